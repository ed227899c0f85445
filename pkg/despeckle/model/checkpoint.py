from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np

from despeckle.nn.optimizer import AdamState
from despeckle.nn.score_net import ScoreNetConfig
from despeckle.schedule.noise_schedule import NoiseSchedule


@dataclass
class Checkpoint:
    """
    用途：训练持久化单元。
    入参说明：
        version (int): 格式版本。
        train_config (Dict[str, Any]): 训练配置回显（不含网络结构）。
        schedule (NoiseSchedule): 日程。
        arch (ScoreNetConfig): 网络结构描述。
        layout (List[Tuple[str, Tuple[int, ...]]]): 参数名与形状，决定参数块顺序。
        parameters (List[np.ndarray]): 与 layout 对应的 float32 参数。
        optimizer (AdamState): Adam 状态。
        epoch (int): 已完成的轮数。
        rng_state (Dict[str, Any]): 各随机流的状态。
    """
    version: int
    train_config: Dict[str, Any]
    schedule: NoiseSchedule
    arch: ScoreNetConfig
    layout: List[Tuple[str, Tuple[int, ...]]]
    parameters: List[np.ndarray]
    optimizer: AdamState
    epoch: int = 0
    rng_state: Dict[str, Any] = field(default_factory=dict)

    @property
    def parameter_count(self) -> int:
        return int(sum(int(np.prod(shape, dtype=np.int64)) for _, shape in self.layout))


@dataclass
class CheckpointHeader:
    """
    用途：只读取头部即可得到的检查点摘要，不加载参数块。
    """
    version: int
    steps: int
    eta_per_step: float
    epoch: int
    arch: ScoreNetConfig
    parameter_count: int
    optimizer_step: int
