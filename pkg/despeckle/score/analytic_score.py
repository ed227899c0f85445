"""
解析分数 oracle：数据分布为点质量或逐元素高斯时，前向核是高斯的，分数有闭式解。
采样器、训练诊断与自检命令都依赖这些 oracle。
"""
import numpy as np

from despeckle.common.errors import DegenerateKernelError, ShapeError
from despeckle.common.i18n_utils import t
from despeckle.schedule.noise_schedule import NoiseSchedule
from despeckle.score.base_score_model import ScoreModel


def _broadcasts_to(shape: tuple, target: tuple) -> bool:
    try:
        return np.broadcast_shapes(shape, target) == target
    except ValueError:
        return False


def analytic_delta_score(y: np.ndarray, k: int, y0: np.ndarray, s: NoiseSchedule) -> np.ndarray:
    """
    用途说明：点质量数据 y0 的精确分数 −(y − y0 + ½η(k))/η(k)。
    入参说明：
        y (np.ndarray): 第 k 步状态。
        k (int): 步序号，须 ≥ 1。
        y0 (np.ndarray): 点质量位置，与 y 同形状或可广播的标量。
        s (NoiseSchedule): 日程。
    返回值说明：np.ndarray: 与 y 同形状的分数。
    """
    s.check_step(k)
    eta_k = s.eta_at(k)
    if eta_k <= 0.0:
        raise DegenerateKernelError(t('score_delta_degenerate', k=k))
    y = np.asarray(y, dtype=np.float64)
    y0 = np.asarray(y0, dtype=np.float64)
    if not _broadcasts_to(y0.shape, y.shape):
        raise ShapeError(t('score_shape_mismatch', left=y.shape, right=y0.shape))
    return -(y - y0 + 0.5 * eta_k) / eta_k


def analytic_gaussian_score(y: np.ndarray, k: int, mu0: np.ndarray, var0: np.ndarray,
                            s: NoiseSchedule) -> np.ndarray:
    """
    用途说明：若 y0 ~ N(mu0, var0) 逐元素独立，则 y_k ~ N(mu0 − ½η(k), var0 + η(k))，
    分数为 −(y − mu0 + ½η(k))/(var0 + η(k))。var0 = 0 时退化为点质量分数。
    """
    s.check_step(k)
    eta_k = s.eta_at(k)
    y = np.asarray(y, dtype=np.float64)
    mu0 = np.asarray(mu0, dtype=np.float64)
    var0 = np.asarray(var0, dtype=np.float64)
    if np.any(var0 < 0.0):
        raise DegenerateKernelError(t('score_negative_variance'))
    total_var = var0 + eta_k
    if np.any(total_var <= 0.0):
        raise DegenerateKernelError(t('score_gaussian_degenerate', k=k))
    return -(y - mu0 + 0.5 * eta_k) / total_var


class DeltaScoreModel(ScoreModel):
    """
    用途：点质量数据的精确分数模型，满足 ScoreModel 接口。
    """

    def __init__(self, y0: np.ndarray, schedule: NoiseSchedule) -> None:
        self.y0: np.ndarray = np.asarray(y0, dtype=np.float64)
        self.schedule: NoiseSchedule = schedule

    def evaluate(self, y: np.ndarray, k: int) -> np.ndarray:
        return analytic_delta_score(y, k, self.y0, self.schedule)


class GaussianScoreModel(ScoreModel):
    """
    用途：逐元素高斯数据 N(mu0, var0) 的精确分数模型。
    """

    def __init__(self, mu0: np.ndarray, var0: np.ndarray, schedule: NoiseSchedule) -> None:
        self.mu0: np.ndarray = np.asarray(mu0, dtype=np.float64)
        self.var0: np.ndarray = np.asarray(var0, dtype=np.float64)
        self.schedule: NoiseSchedule = schedule

    def evaluate(self, y: np.ndarray, k: int) -> np.ndarray:
        return analytic_gaussian_score(y, k, self.mu0, self.var0, self.schedule)


class ConstantScoreModel(ScoreModel):
    """
    用途：处处返回常数的分数模型，用于采样器单步算术校验。
    """

    def __init__(self, value: float = 0.0) -> None:
        self.value: float = float(value)

    def evaluate(self, y: np.ndarray, k: int) -> np.ndarray:
        return np.full(np.shape(y), self.value, dtype=np.float64)
