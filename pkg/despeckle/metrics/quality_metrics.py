"""
图像质量指标：MSE、PSNR、SSIM。输入为 [C, H, W] 或 [H, W] 的强度图。
"""
import numpy as np
from scipy.signal import correlate2d

from config import GlobalConfig
from despeckle.common.errors import ContractError, InvalidArgumentError
from despeckle.common.i18n_utils import t

SSIM_SIGMA: float = 1.5


def _as_channels(a) -> np.ndarray:
    data = a.data if hasattr(a, "data") and not isinstance(a, np.ndarray) else a
    array = np.asarray(data, dtype=np.float64)
    return array[None, ...] if array.ndim == 2 else array


def _check_shapes(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ContractError(t('metrics_shape_mismatch', left=a.shape, right=b.shape))


def mse(a, b) -> float:
    a, b = _as_channels(a), _as_channels(b)
    _check_shapes(a, b)
    return float(np.mean((a - b) ** 2))


def psnr(a, b, peak: float = 1.0) -> float:
    """
    用途说明：峰值信噪比 10·log10(peak²/MSE)；MSE 为 0 或结果超过上限时返回上限 100 dB。
    入参说明：
        a, b: 同形状的图像。
        peak (float): 峰值。
    返回值说明：float: dB。
    """
    error = mse(a, b)
    if error <= 0.0:
        return GlobalConfig.PSNR_CAP_DB
    return float(min(10.0 * np.log10(peak * peak / error), GlobalConfig.PSNR_CAP_DB))


def gaussian_window(size: int = 11, sigma: float = SSIM_SIGMA) -> np.ndarray:
    """
    用途说明：归一化的二维高斯窗。
    """
    coords = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    profile = np.exp(-(coords ** 2) / (2.0 * sigma * sigma))
    window = np.outer(profile, profile)
    return window / window.sum()


def ssim(a, b, window: int = 11, k1: float = 0.01, k2: float = 0.03, peak: float = 1.0) -> float:
    """
    用途说明：结构相似度。在每个完整落入图像的 window×window 高斯窗（σ=1.5）上计算局部 SSIM，
    对所有窗口位置取平均，多通道再取平均。
    入参说明：
        a, b: 同形状图像，H、W ≥ window。
        window (int): 窗口边长。
        k1, k2 (float): 稳定常数系数，C1=(k1·peak)²，C2=(k2·peak)²。
        peak (float): 峰值。
    返回值说明：float: [−1, 1] 内的 SSIM。
    """
    a, b = _as_channels(a), _as_channels(b)
    _check_shapes(a, b)
    if a.shape[1] < window or a.shape[2] < window:
        raise InvalidArgumentError(t('metrics_image_too_small', shape=a.shape, window=window))

    weights = gaussian_window(window)
    c1, c2 = (k1 * peak) ** 2, (k2 * peak) ** 2
    values = []
    for x, y in zip(a, b):
        mu_x = correlate2d(x, weights, mode="valid")
        mu_y = correlate2d(y, weights, mode="valid")
        var_x = correlate2d(x * x, weights, mode="valid") - mu_x * mu_x
        var_y = correlate2d(y * y, weights, mode="valid") - mu_y * mu_y
        cov = correlate2d(x * y, weights, mode="valid") - mu_x * mu_y
        numerator = (2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)
        denominator = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
        values.append(np.mean(numerator / denominator))
    return float(np.mean(values))
