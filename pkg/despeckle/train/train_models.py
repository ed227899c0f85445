from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional

from despeckle.common.errors import InvalidArgumentError
from despeckle.common.i18n_utils import t
from despeckle.nn.score_net import ScoreNetConfig


@dataclass
class TrainConfig:
    """
    用途：训练配置。
    入参说明：
        epochs (int): 训练轮数 E，≥ 0；一轮为数据集所有样本位置完整走一遍。
        batch_size (int): 批大小。
        learning_rate (float): 初始学习率。
        lr_final (Optional[float]): 给定时学习率按总步数线性退火到该值。
        steps (int): 扩散总步数 K。
        eta_per_step (float): 每步方差增量。
        seed (int): 全局种子。
        patch_size (int): 训练裁块边长，须为 4 的倍数。
        data_dir (str): 数据目录。
        checkpoint_interval (int): 每多少轮写一次中间检查点，0 表示不写。
        checkpoint_path (str): 最终检查点路径；中间检查点为 <checkpoint_path>.epoch<N>。
        network (ScoreNetConfig): 网络结构。
    """
    epochs: int = 10
    batch_size: int = 16
    learning_rate: float = 1e-3
    lr_final: Optional[float] = None
    steps: int = 500
    eta_per_step: float = 0.0004
    seed: int = 0
    patch_size: int = 32
    data_dir: str = ""
    checkpoint_interval: int = 0
    checkpoint_path: str = ""
    network: ScoreNetConfig = field(default_factory=ScoreNetConfig)

    def validate(self) -> None:
        if self.epochs < 0 or self.batch_size < 1 or self.steps < 1 or self.checkpoint_interval < 0:
            raise InvalidArgumentError(t('train_bad_counts', epochs=self.epochs, batch=self.batch_size,
                                         steps=self.steps, interval=self.checkpoint_interval))
        if not self.learning_rate > 0.0 or (self.lr_final is not None and self.lr_final < 0.0):
            raise InvalidArgumentError(t('train_bad_lr', lr=self.learning_rate, lr_final=self.lr_final))
        if self.patch_size < 4 or self.patch_size % 4:
            raise InvalidArgumentError(t('train_bad_patch', patch=self.patch_size))
        if self.network.kind == "unet" and self.patch_size % self.network.spatial_multiple:
            raise InvalidArgumentError(t('train_patch_network_mismatch', patch=self.patch_size,
                                         multiple=self.network.spatial_multiple))
        self.network.validate()

    def to_dict(self) -> Dict[str, Any]:
        """用途说明：检查点头部中的训练配置回显，不含网络结构（网络结构单独存放）。"""
        data = asdict(self)
        data.pop("network")
        return data
