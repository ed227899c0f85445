import numpy as np

from despeckle.common.errors import DegenerateKernelError, ShapeError
from despeckle.common.i18n_utils import t
from despeckle.nn import ops
from despeckle.nn.layers import Module
from despeckle.nn.tensor import Tensor, no_grad
from despeckle.schedule.noise_schedule import NoiseSchedule
from despeckle.score.base_score_model import ScoreModel


def _inverse_root_eta(schedule: NoiseSchedule, ks: np.ndarray, ndim: int) -> np.ndarray:
    ks = np.asarray(ks, dtype=np.int64).reshape(-1)
    for k in ks:
        schedule.check_step(int(k), lower=1)
    root = np.sqrt(schedule.eta[ks])
    if np.any(root <= 0.0):
        raise DegenerateKernelError(t('score_delta_degenerate', k=int(ks[np.argmin(root)])))
    return (1.0 / root).reshape((-1,) + (1,) * (ndim - 1))


class NetworkScoreModel(ScoreModel):
    """
    用途：把噪声预测网络包装为分数模型：s_θ(y, k) = −ε̂(y, k)/√η(k)。
    推理在 no_grad 下执行，网络本身无可变状态，可被多线程并发只读调用。
    入参说明：
        network (Module): ScoreNet 或 ScoreMLP。
        schedule (NoiseSchedule): 训练时使用的日程。
    """

    def __init__(self, network: Module, schedule: NoiseSchedule) -> None:
        self.network: Module = network
        self.schedule: NoiseSchedule = schedule

    def evaluate(self, y: np.ndarray, k: int) -> np.ndarray:
        y = np.asarray(y, dtype=np.float64)
        return self.score_batch(y[None, ...], np.array([int(k)]))[0]

    def _pad_to_multiple(self, y_batch: np.ndarray):
        """
        用途说明：U 形网络要求 H、W 为 2^depth 的整数倍；推理时把右侧与下侧做镜像补齐，返回补齐后的批与原尺寸。
        """
        config = getattr(self.network, "config", None)
        multiple = config.spatial_multiple if config is not None else 1
        if multiple <= 1 or y_batch.ndim != 4:
            return y_batch, None
        height, width = y_batch.shape[2], y_batch.shape[3]
        pad_h, pad_w = -height % multiple, -width % multiple
        if not pad_h and not pad_w:
            return y_batch, None
        padded = np.pad(y_batch, ((0, 0), (0, 0), (0, pad_h), (0, pad_w)), mode="symmetric")
        return padded, (height, width)

    def score_batch(self, y_batch: np.ndarray, ks: np.ndarray) -> np.ndarray:
        """
        用途：批量推理。任意尺寸输入均可，输出裁回输入尺寸。
        """
        y_batch = np.asarray(y_batch, dtype=np.float64)
        padded, original = self._pad_to_multiple(y_batch)
        with no_grad():
            score = self.score_tensor(Tensor(padded), ks).data.astype(np.float64, copy=False)
        if original is not None:
            score = np.ascontiguousarray(score[:, :, :original[0], :original[1]])
        return score

    def score_tensor(self, y_batch: Tensor, ks: np.ndarray) -> Tensor:
        """
        用途：可微的批量分数，梯度经网络参数回传，供训练损失使用。
        """
        ks = np.asarray(ks).reshape(-1)
        if y_batch.data.ndim < 1 or ks.size != y_batch.shape[0]:
            raise ShapeError(t('nn_step_batch_mismatch', steps=ks.size, batch=y_batch.shape[0] if y_batch.data.ndim else 0))
        scale = -_inverse_root_eta(self.schedule, ks, y_batch.data.ndim)
        return ops.mul(self.network.forward(y_batch, ks), scale)
