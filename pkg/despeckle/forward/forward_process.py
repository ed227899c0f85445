"""
前向乘性噪声过程：强度域几何布朗运动的闭式解，及其在对数域中的高斯形式。

对数域单步递推 y_k = y_{k-1} − ½Δ + √Δ·n，累计后 y_k = y_0 − ½η(k) + √η(k)·n_k；
强度域 x_k = x_0 ⊙ exp(−½η(k) + √η(k)·n_k)，乘性因子服从对数正态分布且均值为 1。
"""
from typing import Optional, Tuple, Union

import numpy as np

from despeckle.common.errors import DomainError, ShapeError
from despeckle.common.i18n_utils import t
from despeckle.forward.random_source import RandomSource
from despeckle.model.forward_sample import ForwardSample
from despeckle.model.image_tensor import ImageTensor, LogImage
from despeckle.schedule.noise_schedule import NoiseSchedule

ArrayOrLog = Union[np.ndarray, LogImage, float]
ArrayOrImage = Union[np.ndarray, ImageTensor, float]

# 伊藤修正项系数：无漂移几何布朗运动在对数域的漂移为 −½α²
ITO_DRIFT: float = -0.5


def _log_array(y0: ArrayOrLog) -> np.ndarray:
    data = y0.data if isinstance(y0, LogImage) else y0
    return np.asarray(data, dtype=np.float64)


def _draw(shape: Tuple[int, ...], rng: RandomSource, noise: Optional[np.ndarray]) -> np.ndarray:
    if noise is None:
        return rng.normal(shape)
    noise = np.asarray(noise, dtype=np.float64)
    if noise.shape != shape:
        raise ShapeError(t('forward_noise_shape', expected=shape, actual=noise.shape))
    return noise


def corrupt_log(y0: ArrayOrLog, k: int, s: NoiseSchedule, rng: RandomSource,
                noise: Optional[np.ndarray] = None, drift: float = ITO_DRIFT) -> ForwardSample:
    """
    用途说明：对数域一次性加噪到第 k 步：y_k = y0 − ½η(k) + √η(k)·n_k，并记录 n_k。
    入参说明：
        y0 (np.ndarray | LogImage): 干净对数图像，任意形状。
        k (int): 目标步，0 ≤ k ≤ K。
        s (NoiseSchedule): 日程。
        rng (RandomSource): 随机源。
        noise (np.ndarray, optional): 注入的标准正态样本，给定时不再抽样。
        drift (float): 漂移系数，默认 −½；仅自检命令的负对照会改动它。
    返回值说明：ForwardSample
    """
    s.check_step(k)
    y0_data = _log_array(y0)
    if not np.all(np.isfinite(y0_data)):
        raise DomainError(t('log_image_not_finite'))

    n_k = _draw(y0_data.shape, rng, noise)
    eta_k = s.eta_at(k)
    y_k = y0_data + drift * eta_k + np.sqrt(eta_k) * n_k
    factor = np.exp(drift * eta_k + np.sqrt(eta_k) * n_k)
    return ForwardSample(y_k=y_k, n_k=n_k, k=int(k), factor=factor)


def corrupt_intensity(x0: ArrayOrImage, k: int, s: NoiseSchedule, rng: RandomSource,
                      noise: Optional[np.ndarray] = None,
                      drift: float = ITO_DRIFT) -> Tuple[np.ndarray, ForwardSample]:
    """
    用途说明：强度域乘性加噪 x_k = x0 ⊙ exp(−½η(k) + √η(k)·n_k)。结果不截断，可能大于 1。
    经对数域计算，因此与 exp(corrupt_log(log x0).y_k) 逐位一致；k=0 时原样返回 x0。
    入参说明：同 corrupt_log，x0 须严格为正。
    返回值说明：Tuple[np.ndarray, ForwardSample] - (加噪强度图, 对数域样本)
    """
    data = x0.data if isinstance(x0, ImageTensor) else x0
    x0_data = np.asarray(data, dtype=np.float64)
    # 先校验定义域，再做任何抽样
    if not np.all(np.isfinite(x0_data)) or np.any(x0_data <= 0.0):
        raise DomainError(t('image_not_positive'))

    sample = corrupt_log(np.log(x0_data), k, s, rng, noise=noise, drift=drift)
    if sample.k == 0:
        return x0_data.copy(), sample
    return np.exp(sample.y_k), sample


def simulate_forward_path(y0: ArrayOrLog, k: int, s: NoiseSchedule, rng: RandomSource,
                          noises: Optional[np.ndarray] = None) -> np.ndarray:
    """
    用途说明：逐步迭代 Euler–Maruyama 递推 y_j = y_{j−1} − ½Δ_j + √Δ_j·n_j 共 k 次，
    只作为与 corrupt_log 分布等价性的独立对照。
    入参说明：
        noises (np.ndarray, optional): 形状 [k, *y0.shape] 的逐步噪声，给定时不再抽样。
    返回值说明：np.ndarray: 第 k 步的对数域状态。
    """
    s.check_step(k)
    y = _log_array(y0).copy()
    if noises is not None:
        noises = np.asarray(noises, dtype=np.float64)
        if noises.shape != (int(k),) + y.shape:
            raise ShapeError(t('forward_noise_shape', expected=(int(k),) + y.shape, actual=noises.shape))

    for j in range(1, int(k) + 1):
        delta = s.increment(j)
        n_j = rng.normal(y.shape) if noises is None else noises[j - 1]
        y = y + ITO_DRIFT * delta + np.sqrt(delta) * n_j
    return y
