"""
分数网络。网络输出噪声预测 ε̂(y_k, k)，分数由 NetworkScoreModel 换算为 −ε̂/√η(k)。
最后一层零初始化，初始分数估计恒为 0。
"""
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np

from despeckle.common.errors import InvalidArgumentError, ShapeError
from despeckle.common.i18n_utils import t
from despeckle.forward.random_source import RandomSource, StreamId
from despeckle.nn import ops
from despeckle.nn.embedding import time_embedding
from despeckle.nn.layers import Conv2d, Linear, Module, ResidualBlock
from despeckle.nn.tensor import Tensor


@dataclass
class ScoreNetConfig:
    """
    用途：网络结构描述，写入检查点头部，可由它复现参数数量与初始化。
    入参说明：
        kind (str): "unet"（卷积 U 形网络）或 "mlp"（逐元素单隐层网络，用于标量玩具数据）。
        channels (int): 图像通道数（unet）。
        widths (List[int]): 各分辨率的通道宽度，长度 = 下采样次数 + 1。
        embedding_dim (int): 时间嵌入维度。
        hidden (int): mlp 隐层宽度。
        seed (int): 初始化种子。
    """
    kind: str = "unet"
    channels: int = 1
    widths: List[int] = field(default_factory=lambda: [32, 64, 64])
    embedding_dim: int = 32
    hidden: int = 64
    seed: int = 0

    @property
    def depth(self) -> int:
        return len(self.widths) - 1

    @property
    def spatial_multiple(self) -> int:
        """用途说明：输入 H、W 必须是该值的整数倍。"""
        return 2 ** self.depth if self.kind == "unet" else 1

    def validate(self) -> None:
        if self.kind not in ("unet", "mlp"):
            raise InvalidArgumentError(t('nn_unknown_kind', kind=self.kind))
        if self.embedding_dim <= 0 or self.embedding_dim % 2:
            raise InvalidArgumentError(t('nn_embedding_odd_dim', dim=self.embedding_dim))
        if self.kind == "unet" and (not self.widths or min(self.widths) < 1 or self.channels < 1):
            raise InvalidArgumentError(t('nn_bad_widths', widths=self.widths))
        if self.kind == "mlp" and self.hidden < 1:
            raise InvalidArgumentError(t('nn_bad_hidden', hidden=self.hidden))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ScoreNetConfig':
        return cls(kind=str(data["kind"]), channels=int(data["channels"]),
                   widths=[int(w) for w in data["widths"]], embedding_dim=int(data["embedding_dim"]),
                   hidden=int(data["hidden"]), seed=int(data["seed"]))


class ScoreNet(Module):
    """
    用途：小型 U 形卷积网络。每个分辨率一个时间条件残差块，下采样用 2×2 平均池化，
    上采样用最近邻，跳连为逐元素相加。
    """

    def __init__(self, config: ScoreNetConfig, dtype=np.float32) -> None:
        super().__init__()
        config.validate()
        self.config: ScoreNetConfig = config
        rng = RandomSource(config.seed, StreamId.NETWORK_INIT)
        widths, emb = config.widths, config.embedding_dim

        self.in_conv: Conv2d = self.register_child("in_conv", Conv2d(config.channels, widths[0], rng, dtype=dtype))
        self.down_convs: List[Conv2d] = []
        self.down_blocks: List[ResidualBlock] = [
            self.register_child("down0", ResidualBlock(widths[0], emb, rng, dtype=dtype))
        ]
        for level in range(1, len(widths)):
            self.down_convs.append(self.register_child(
                f"down_conv{level}", Conv2d(widths[level - 1], widths[level], rng, dtype=dtype)))
            self.down_blocks.append(self.register_child(
                f"down{level}", ResidualBlock(widths[level], emb, rng, dtype=dtype)))

        self.up_convs: List[Conv2d] = []
        self.up_blocks: List[ResidualBlock] = []
        for level in range(len(widths) - 1, 0, -1):
            self.up_convs.append(self.register_child(
                f"up_conv{level}", Conv2d(widths[level], widths[level - 1], rng, dtype=dtype)))
            self.up_blocks.append(self.register_child(
                f"up{level}", ResidualBlock(widths[level - 1], emb, rng, dtype=dtype)))

        self.out_conv: Conv2d = self.register_child(
            "out_conv", Conv2d(widths[0], config.channels, rng, zero_init=True, dtype=dtype))

    def forward(self, y: Tensor, ks: np.ndarray) -> Tensor:
        """
        用途说明：批量噪声预测。
        入参说明：
            y (Tensor): [N, C, H, W] 对数域状态。
            ks (np.ndarray): [N] 步序号。
        返回值说明：Tensor: [N, C, H, W] 噪声预测 ε̂。
        """
        multiple = self.config.spatial_multiple
        if y.data.ndim != 4 or y.shape[1] != self.config.channels or y.shape[2] % multiple or y.shape[3] % multiple:
            raise ShapeError(t('nn_input_shape', shape=y.shape, channels=self.config.channels, multiple=multiple))
        embedding = Tensor(time_embedding(np.asarray(ks).reshape(-1), self.config.embedding_dim))

        h = self.down_blocks[0](self.in_conv(y), embedding)
        skips: List[Tensor] = [h]
        for conv, block in zip(self.down_convs, self.down_blocks[1:]):
            h = block(conv(ops.avgpool2(h)), embedding)
            skips.append(h)

        skips.pop()
        for conv, block in zip(self.up_convs, self.up_blocks):
            h = ops.add(conv(ops.upsample2(h)), skips.pop())
            h = block(h, embedding)

        return self.out_conv(ops.silu(ops.channel_norm(h)))


class ScoreMLP(Module):
    """
    用途：逐元素单隐层网络，输入为 [y, time_embedding(k)]，用于标量玩具数据的学习校验。
    任意形状的批量 [N, ...] 都按元素独立处理。
    """

    def __init__(self, config: ScoreNetConfig, dtype=np.float32) -> None:
        super().__init__()
        config.validate()
        self.config: ScoreNetConfig = config
        rng = RandomSource(config.seed, StreamId.NETWORK_INIT)
        self.value_proj: Linear = self.register_child("value_proj", Linear(1, config.hidden, rng, dtype=dtype))
        self.time_proj: Linear = self.register_child(
            "time_proj", Linear(config.embedding_dim, config.hidden, rng, dtype=dtype))
        self.output: Linear = self.register_child(
            "output", Linear(config.hidden, 1, rng, zero_init=True, dtype=dtype))

    def forward(self, y: Tensor, ks: np.ndarray) -> Tensor:
        batch = y.shape[0] if y.data.ndim else 1
        per_sample = max(y.size // max(batch, 1), 1)
        ks = np.asarray(ks).reshape(-1)
        if ks.size != batch:
            raise ShapeError(t('nn_step_batch_mismatch', steps=ks.size, batch=batch))

        column = ops.reshape(y, (y.size, 1))
        embedding = Tensor(np.repeat(time_embedding(ks, self.config.embedding_dim), per_sample, axis=0))
        hidden = ops.silu(ops.add(self.value_proj(column), self.time_proj(embedding)))
        return ops.reshape(self.output(hidden), y.shape)


def build_score_network(config: ScoreNetConfig, dtype=np.float32) -> Module:
    """
    用途说明：按结构描述构造网络。
    """
    config.validate()
    if config.kind == "mlp":
        return ScoreMLP(config, dtype=dtype)
    return ScoreNet(config, dtype=dtype)


def parameter_layout(network: Module) -> List[Tuple[str, Tuple[int, ...]]]:
    """用途说明：参数名与形状的有序列表，即检查点参数块的排列顺序。"""
    return [(name, tuple(tensor.shape)) for name, tensor in network.named_parameters()]
