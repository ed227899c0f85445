from dataclasses import dataclass

import numpy as np

from despeckle.common.errors import DomainError, ShapeError
from despeckle.common.i18n_utils import t


@dataclass(frozen=True)
class ImageTensor:
    """
    用途：强度域图像 x，形状 [C, H, W]，每个元素严格大于 0。
    bounded 为 True 时（干净图像）还要求元素 ≤ 1；加噪或去噪结果不截断，bounded 为 False。
    """
    data: np.ndarray
    bounded: bool = True

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 3 or min(data.shape) < 1:
            raise ShapeError(t('image_bad_shape', shape=data.shape))
        if not np.all(np.isfinite(data)) or np.any(data <= 0.0):
            raise DomainError(t('image_not_positive'))
        if self.bounded and np.any(data > 1.0):
            raise DomainError(t('image_above_one'))
        object.__setattr__(self, 'data', data)

    @property
    def shape(self):
        return self.data.shape

    def to_log(self) -> 'LogImage':
        """用途说明：逐元素取对数得到对数域图像 y = log x。"""
        return LogImage(np.log(self.data))


@dataclass(frozen=True)
class LogImage:
    """
    用途：对数域图像 y = log x，形状 [C, H, W]，元素有限。
    """
    data: np.ndarray

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 3 or min(data.shape) < 1:
            raise ShapeError(t('image_bad_shape', shape=data.shape))
        if not np.all(np.isfinite(data)):
            raise DomainError(t('log_image_not_finite'))
        object.__setattr__(self, 'data', data)

    def to_intensity(self) -> ImageTensor:
        """用途说明：取指数回到强度域，不截断。"""
        return ImageTensor(np.exp(self.data), bounded=False)
