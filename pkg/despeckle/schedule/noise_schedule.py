from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from despeckle.common.errors import InvalidArgumentError, LevelUnreachableError, StepIndexError
from despeckle.common.i18n_utils import t


@dataclass(frozen=True)
class NoiseSchedule:
    """
    用途说明：离散噪声日程。eta[k] = σ(k) − σ(0) 为第 k 步累计方差，eta[0] = 0，且严格递增。
    构造后不可变，可被多线程并发读取。
    入参说明：
        eta (np.ndarray): 长度为 K+1 的累计方差表。
        eta_per_step (float): 线性日程的每步增量；非线性日程记录为 0。
    """
    eta: np.ndarray
    eta_per_step: float = 0.0
    _increments: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        eta = np.array(self.eta, dtype=np.float64)
        if eta.ndim != 1 or eta.size < 2:
            raise InvalidArgumentError(t('schedule_too_short'))
        if eta[0] != 0.0:
            raise InvalidArgumentError(t('schedule_eta0_nonzero', value=eta[0]))
        increments = np.diff(eta)
        if not np.all(np.isfinite(eta)) or np.any(increments <= 0.0):
            raise InvalidArgumentError(t('schedule_not_increasing'))
        eta.setflags(write=False)
        increments.setflags(write=False)
        object.__setattr__(self, 'eta', eta)
        object.__setattr__(self, '_increments', increments)

    @property
    def steps(self) -> int:
        """用途说明：总扩散步数 K。"""
        return int(self.eta.size - 1)

    @property
    def max_level(self) -> float:
        """用途说明：可达到的最大噪声方差 eta[K]。"""
        return float(self.eta[-1])

    def eta_at(self, k: int) -> float:
        """
        用途说明：查表返回 eta[k]。
        入参说明：k (int): 步序号，0 ≤ k ≤ K。
        返回值说明：float: 累计方差。
        """
        self.check_step(k)
        return float(self.eta[k])

    def increment(self, k: int) -> float:
        """
        用途说明：第 k 步的方差增量 eta[k] − eta[k−1]，要求 1 ≤ k ≤ K。
        """
        self.check_step(k, lower=1)
        return float(self._increments[k - 1])

    def check_step(self, k: int, lower: int = 0) -> None:
        """
        用途说明：校验步序号范围，越界抛出 index 类错误。
        入参说明：
            k (int): 步序号。
            lower (int): 允许的最小值。
        """
        if not lower <= int(k) <= self.steps:
            raise StepIndexError(t('schedule_step_out_of_range', k=k, lower=lower, upper=self.steps))

    def summary(self) -> Dict[str, object]:
        """用途说明：日程摘要，用于运行清单与检查点头部。"""
        return {"steps": self.steps, "eta_per_step": self.eta_per_step, "max_level": self.max_level}


def build_linear_schedule(steps: int = 500, eta_per_step: float = 0.0004) -> NoiseSchedule:
    """
    用途说明：构造累计方差线性增长的日程 eta[k] = k · eta_per_step。
    默认 K=500、每步 0.0004，使 eta(100)=0.04、eta(200)=0.08、eta(300)=0.12 与三档噪声水平对应。
    入参说明：
        steps (int): 总步数 K，≥ 1。
        eta_per_step (float): 每步方差增量，> 0。
    返回值说明：NoiseSchedule
    """
    if int(steps) != steps or steps < 1:
        raise InvalidArgumentError(t('schedule_bad_steps', steps=steps))
    if not eta_per_step > 0.0 or not np.isfinite(eta_per_step):
        raise InvalidArgumentError(t('schedule_bad_eta_per_step', value=eta_per_step))
    eta = np.arange(int(steps) + 1, dtype=np.float64) * float(eta_per_step)
    return NoiseSchedule(eta=eta, eta_per_step=float(eta_per_step))


def build_sigma_range_schedule(steps: int = 500, sigma_min: float = 0.0001, sigma_max: float = 0.02) -> NoiseSchedule:
    """
    用途说明：另一种参数化：把 [sigma_min, sigma_max] 理解为逐步增量的线性区间，
    eta[k] 为前 k 个增量之和。与噪声水平与步数的映射不一致，仅作备选构造方式。
    """
    if int(steps) != steps or steps < 1:
        raise InvalidArgumentError(t('schedule_bad_steps', steps=steps))
    if not 0.0 < sigma_min <= sigma_max:
        raise InvalidArgumentError(t('schedule_bad_sigma_range', low=sigma_min, high=sigma_max))
    increments = np.linspace(sigma_min, sigma_max, int(steps), dtype=np.float64)
    eta = np.concatenate(([0.0], np.cumsum(increments)))
    return NoiseSchedule(eta=eta)


def eta(s: NoiseSchedule, k: int) -> float:
    """
    用途说明：纯查表 eta[k]；越界抛出 index 类错误。
    """
    return s.eta_at(k)


def step_for_noise_level(s: NoiseSchedule, level: float) -> int:
    """
    用途说明：把物理噪声方差映射为扩散步序号：满足 eta[k] ≥ level 的最小 k。
    入参说明：
        s (NoiseSchedule): 日程。
        level (float): 噪声方差，0 ≤ level ≤ eta[K]。
    返回值说明：int: 步序号。
    """
    if not np.isfinite(level) or level < 0.0:
        raise InvalidArgumentError(t('schedule_bad_level', level=level))
    if level > s.max_level:
        raise LevelUnreachableError(t('schedule_level_unreachable', level=level, maximum=s.max_level))
    return int(np.searchsorted(s.eta, level, side='left'))
