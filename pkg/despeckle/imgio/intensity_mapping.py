import numpy as np

from despeckle.model.image_tensor import ImageTensor
from despeckle.model.raw_image import RawImage


def to_intensity(raw: RawImage) -> ImageTensor:
    """
    用途说明：8 位样本映射到严格为正的强度 x = (p + 1)/256 ∈ [1/256, 1]，布局转为 [C, H, W]。
    """
    x = (raw.samples.astype(np.float64) + 1.0) / 256.0
    return ImageTensor(np.ascontiguousarray(x.transpose(2, 0, 1)))


def from_intensity(x) -> RawImage:
    """
    用途说明：强度映射回 8 位样本 p = clamp(round(256·x − 1), 0, 255)；加噪或去噪后越界的强度在此截断。
    入参说明：x (ImageTensor | np.ndarray): [C, H, W] 有限强度。
    返回值说明：RawImage
    """
    data = np.asarray(x.data if isinstance(x, ImageTensor) else x, dtype=np.float64)
    samples = np.clip(np.rint(256.0 * data - 1.0), 0, 255).astype(np.uint8)
    channels, height, width = samples.shape
    return RawImage(width=width, height=height, channels=channels, samples=samples.transpose(1, 2, 0))
