"""
训练循环：每步取一批干净对数图像，k ~ Uniform{1..K}，对去噪分数匹配损失做一次 Adam 更新。
"""
import math
from concurrent.futures import Future
from dataclasses import replace
from typing import Any, Dict, List, Optional, Protocol

import numpy as np

from config import GlobalConfig
from despeckle.common.errors import ConfigError, NonFiniteLossError
from despeckle.common.i18n_utils import t
from despeckle.common.log_utils import LogUtils
from despeckle.common.thread_pool import ThreadPoolManager
from despeckle.forward.random_source import RandomSource, StreamId
from despeckle.model.checkpoint import Checkpoint
from despeckle.nn.layers import Module
from despeckle.nn.optimizer import AdamState, adam_step
from despeckle.nn.score_net import build_score_network, parameter_layout
from despeckle.nn.tensor import backward
from despeckle.schedule.noise_schedule import NoiseSchedule, build_linear_schedule
from despeckle.score.network_score_model import NetworkScoreModel
from despeckle.train.checkpoint_codec import save_checkpoint
from despeckle.train.loss import loss_batch
from despeckle.train.train_models import TrainConfig


class TrainingDataset(Protocol):
    """
    用途：训练数据源接口：按批给出干净对数图像，并声明一轮的样本数。
    """
    items_per_epoch: int

    def next_log_batch(self, batch_size: int) -> np.ndarray:
        ...

    def rng_state(self) -> Dict[str, Any]:
        ...


class Trainer:
    """
    用途：执行训练并保存中间检查点。批数据由线程池提前一批准备，参数更新只在主线程进行。
    入参说明：
        config (TrainConfig): 训练配置。
        dataset (TrainingDataset): 数据源。
    """

    def __init__(self, config: TrainConfig, dataset: TrainingDataset) -> None:
        config.validate()
        if dataset is None or int(getattr(dataset, "items_per_epoch", 0)) < 1:
            raise ConfigError(t('train_empty_dataset'))

        self.config: TrainConfig = config
        self.dataset: TrainingDataset = dataset
        self.schedule: NoiseSchedule = build_linear_schedule(config.steps, config.eta_per_step)
        self.arch = replace(config.network, seed=config.seed)
        self.network: Module = build_score_network(self.arch)
        self.model: NetworkScoreModel = NetworkScoreModel(self.network, self.schedule)
        self.params = self.network.parameters()
        self.optimizer: AdamState = AdamState.for_parameters(self.params)
        self.step_rng: RandomSource = RandomSource(config.seed, StreamId.TRAIN_STEPS)
        self.noise_rng: RandomSource = RandomSource(config.seed, StreamId.TRAIN_NOISE)
        self.steps_per_epoch: int = math.ceil(dataset.items_per_epoch / config.batch_size)
        self.total_steps: int = self.steps_per_epoch * config.epochs
        self.loss_history: List[float] = []
        self.epoch: int = 0

        LogUtils.info(t('train_start', epochs=config.epochs, steps_per_epoch=self.steps_per_epoch,
                        params=self.network.parameter_count(), kind=self.arch.kind))

    def learning_rate(self, global_step: int) -> float:
        """
        用途说明：当前步的学习率；配置了 lr_final 时按总步数线性退火。
        入参说明：global_step (int): 从 0 开始的全局步序号。
        """
        if self.config.lr_final is None or self.total_steps <= 1:
            return self.config.learning_rate
        fraction = min(global_step / (self.total_steps - 1), 1.0)
        return self.config.learning_rate + fraction * (self.config.lr_final - self.config.learning_rate)

    def _train_step(self, y0_batch: np.ndarray, global_step: int) -> float:
        ks = self.step_rng.integers(1, self.schedule.steps, size=y0_batch.shape[0])
        self.network.zero_grad()
        loss = loss_batch(self.model, y0_batch, ks, self.schedule, self.noise_rng)
        value = loss.item()
        if not math.isfinite(value):
            raise NonFiniteLossError(t('train_non_finite_loss', step=global_step, k=",".join(str(int(k)) for k in ks)))
        backward(loss)
        adam_step(self.params, [p.grad for p in self.params], self.optimizer, self.learning_rate(global_step))
        return value

    def run(self) -> Checkpoint:
        """
        用途说明：执行全部轮次，返回最终检查点；E = 0 时返回初始参数、轮数 0 的检查点。
        返回值说明：Checkpoint
        """
        batch_size = self.config.batch_size
        pending: Optional[Future] = None
        if self.total_steps > 0:
            pending = ThreadPoolManager.submit(self.dataset.next_log_batch, batch_size)

        global_step = 0
        for epoch in range(1, self.config.epochs + 1):
            epoch_losses: List[float] = []
            saves_checkpoint = self._interval_checkpoint_due(epoch)
            for index in range(self.steps_per_epoch):
                if pending is None:
                    pending = ThreadPoolManager.submit(self.dataset.next_log_batch, batch_size)
                y0_batch = pending.result()
                # 同一时刻只有一个预取任务，数据流的抽样顺序与单线程一致；
                # 要写中间检查点的轮次末尾不预取，保证快照时数据随机流静止
                is_last = global_step + 1 >= self.total_steps
                epoch_end = index + 1 == self.steps_per_epoch
                pending = None if is_last or (epoch_end and saves_checkpoint) \
                    else ThreadPoolManager.submit(self.dataset.next_log_batch, batch_size)
                value = self._train_step(y0_batch, global_step)
                epoch_losses.append(value)
                self.loss_history.append(value)
                global_step += 1

            self.epoch = epoch
            LogUtils.progress(t('train_epoch_done', epoch=epoch, epochs=self.config.epochs,
                                loss=float(np.mean(epoch_losses)), lr=self.learning_rate(global_step - 1)))
            if saves_checkpoint:
                save_checkpoint(self.checkpoint(), f"{self.config.checkpoint_path}.epoch{epoch}")

        return self.checkpoint()

    def _interval_checkpoint_due(self, epoch: int) -> bool:
        interval = self.config.checkpoint_interval
        return bool(interval and epoch % interval == 0 and epoch < self.config.epochs and self.config.checkpoint_path)

    def checkpoint(self) -> Checkpoint:
        """
        用途说明：以当前状态构造检查点（参数与矩缓冲均为拷贝）。
        """
        return Checkpoint(
            version=GlobalConfig.CHECKPOINT_VERSION,
            train_config=self.config.to_dict(),
            schedule=self.schedule,
            arch=self.arch,
            layout=parameter_layout(self.network),
            parameters=[p.data.astype(np.float32, copy=True) for p in self.params],
            optimizer=AdamState(step=self.optimizer.step,
                                m=[m.copy() for m in self.optimizer.m],
                                v=[v.copy() for v in self.optimizer.v]),
            epoch=self.epoch,
            rng_state={
                "data": self.dataset.rng_state(),
                "noise": self.noise_rng.get_state(),
                "steps": self.step_rng.get_state(),
            },
        )


def train(config: TrainConfig, dataset: TrainingDataset) -> Checkpoint:
    """
    用途说明：按配置训练分数网络并返回最终检查点。
    入参说明：
        config (TrainConfig): 训练配置。
        dataset (TrainingDataset): 非空数据源。
    返回值说明：Checkpoint
    """
    return Trainer(config, dataset).run()


def restore_network(checkpoint: Checkpoint) -> Module:
    """
    用途说明：由检查点重建网络并载入参数，输出与保存时逐位一致。
    """
    network = build_score_network(checkpoint.arch)
    for (name, tensor), (saved_name, shape), values in zip(network.named_parameters(), checkpoint.layout,
                                                           checkpoint.parameters):
        if name != saved_name or tuple(tensor.shape) != tuple(shape):
            raise ConfigError(t('checkpoint_layout_mismatch', name=saved_name, expected=tensor.shape, actual=shape))
        tensor.data[...] = values
    if len(network.parameters()) != len(checkpoint.parameters):
        raise ConfigError(t('checkpoint_layout_mismatch', name="*", expected=len(network.parameters()),
                            actual=len(checkpoint.parameters)))
    return network


def restore_score_model(checkpoint: Checkpoint) -> NetworkScoreModel:
    """用途说明：由检查点得到可直接用于采样的分数模型。"""
    return NetworkScoreModel(restore_network(checkpoint), checkpoint.schedule)
