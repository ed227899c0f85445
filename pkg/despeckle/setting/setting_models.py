from dataclasses import dataclass, field
from typing import List, Optional


@dataclass
class ScheduleSettings:
    """
    用途：噪声日程配置
    """
    steps: int = 500
    eta_per_step: float = 0.0004


@dataclass
class NetworkSettings:
    """
    用途：分数网络结构配置
    """
    kind: str = "unet"  # unet 或 mlp
    widths: List[int] = field(default_factory=lambda: [32, 64, 64])
    embedding_dim: int = 32
    hidden: int = 64


@dataclass
class TrainSettings:
    """
    用途：训练相关配置
    """
    epochs: int = 10
    batch_size: int = 16
    learning_rate: float = 0.001
    lr_final: Optional[float] = None
    patch_size: int = 32
    data_dir: str = ""
    checkpoint_interval: int = 0
    checkpoint_path: str = "model.gbmd"


@dataclass
class SamplerSettings:
    """
    用途：反向采样配置
    """
    method: str = "ode"
    zeta_ratio: float = 0.0  # ζ_k² = zeta_ratio · η(k−1)
    stride: int = 1


@dataclass
class RuntimeSettings:
    """
    用途：运行环境配置
    """
    seed: int = 0
    language: str = "en"
    log_level: str = "INFO"
    log_dir: str = ""
    workers: int = 0  # 0 表示按 CPU 核心数


@dataclass
class AppConfig:
    """
    用途：全局配置汇总数据类
    """
    schedule: ScheduleSettings = field(default_factory=ScheduleSettings)
    network: NetworkSettings = field(default_factory=NetworkSettings)
    train: TrainSettings = field(default_factory=TrainSettings)
    sampler: SamplerSettings = field(default_factory=SamplerSettings)
    runtime: RuntimeSettings = field(default_factory=RuntimeSettings)
