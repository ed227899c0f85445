from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from despeckle.common.errors import InvalidArgumentError
from despeckle.common.i18n_utils import t
from despeckle.schedule.noise_schedule import NoiseSchedule

SAMPLER_METHODS = ("stochastic", "ode", "ddim")


@dataclass
class SamplerConfig:
    """
    用途：反向采样配置。
    入参说明：
        method (str): stochastic / ode / ddim。
        zeta (np.ndarray, optional): 长度 K+1 的 ζ_k 表（ddim 用），None 表示全零。
        stride (int): ddim 的跳步间隔，1 表示逐步。
        k_start (Optional[int]): 起始步；denoise 给定噪声水平时由水平推得。
    """
    method: str = "ode"
    zeta: Optional[np.ndarray] = None
    stride: int = 1
    k_start: Optional[int] = None

    def __post_init__(self) -> None:
        if self.method not in SAMPLER_METHODS:
            raise InvalidArgumentError(t('sampler_unknown_method', method=self.method,
                                         choices=",".join(SAMPLER_METHODS)))
        if int(self.stride) != self.stride or self.stride < 1:
            raise InvalidArgumentError(t('sampler_bad_stride', stride=self.stride))
        if self.stride > 1 and self.method != "ddim":
            raise InvalidArgumentError(t('sampler_stride_ddim_only', method=self.method))
        if self.zeta is not None:
            self.zeta = np.asarray(self.zeta, dtype=np.float64)
            if self.zeta.ndim != 1 or np.any(self.zeta < 0.0) or not np.all(np.isfinite(self.zeta)):
                raise InvalidArgumentError(t('sampler_bad_zeta'))

    def zeta_at(self, k: int) -> float:
        if self.zeta is None:
            return 0.0
        if not 0 <= k < self.zeta.size:
            raise InvalidArgumentError(t('sampler_zeta_missing', k=k, size=self.zeta.size))
        return float(self.zeta[k])

    def previous_step(self, k: int) -> int:
        """用途说明：k 之后的下一步序号，逐步时为 k−1，跳步时不低于 0。"""
        return max(int(k) - int(self.stride), 0)

    def step_sequence(self, k_start: int) -> List[int]:
        """用途说明：从 k_start 向下到 1 依次执行的步序号。"""
        return list(range(int(k_start), 0, -int(self.stride)))


@dataclass
class DdimKernel:
    """
    用途：DDIM 单步转移核 N(mu, var·I)，var == ζ_k²。
    """
    mu: np.ndarray
    var: float


def zeta_from_ratio(s: NoiseSchedule, ratio: float, stride: int = 1) -> np.ndarray:
    """
    用途说明：按比例构造 ζ 表：ζ_k² = ratio · η(k_prev)，k_prev = max(k − stride, 0)。
    ratio ∈ [0, 1]，0 为确定性 DDIM，1 时保留的确定性分量为零。
    入参说明：
        s (NoiseSchedule): 日程。
        ratio (float): 比例。
        stride (int): 跳步间隔。
    返回值说明：np.ndarray: 长度 K+1 的 ζ 表，ζ_0 = 0。
    """
    if not 0.0 <= ratio <= 1.0:
        raise InvalidArgumentError(t('sampler_bad_zeta_ratio', ratio=ratio))
    ks = np.arange(s.steps + 1)
    previous = np.maximum(ks - int(stride), 0)
    return np.sqrt(ratio * s.eta[previous])
