from dataclasses import dataclass

import numpy as np

from despeckle.common.errors import ShapeError
from despeckle.common.i18n_utils import t


@dataclass
class RawImage:
    """
    用途：8 位原始图像，samples 形状 [height, width, channels]（行主序），channels 为 1 或 3。
    """
    width: int
    height: int
    channels: int
    samples: np.ndarray

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.uint8)
        if self.channels not in (1, 3) or self.width < 1 or self.height < 1:
            raise ShapeError(t('raw_image_bad_dims', width=self.width, height=self.height, channels=self.channels))
        if samples.size != self.width * self.height * self.channels:
            raise ShapeError(t('raw_image_sample_count', expected=self.width * self.height * self.channels,
                               actual=samples.size))
        self.samples = samples.reshape(self.height, self.width, self.channels)
