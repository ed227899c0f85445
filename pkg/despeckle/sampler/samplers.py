"""
三种反向过程（对数域）：

    随机：    y ← y + ½Δ(1 + 2s) + √Δ·n
    概率流 ODE：y ← y + ½Δ(1 + s)
    DDIM：    ŷ0 = y + ½η(k) + η(k)·s
              y ← ŷ0 − ½η(k') + √(η(k') − ζ²)/√η(k) · (y − ŷ0 + ½η(k)) + ζ·n

其中 Δ = η(k) − η(k−1)，s = s_θ(y, k)，k' 为下一步（逐步时 k' = k − 1）。
"""
from typing import Optional

import numpy as np

from despeckle.common.errors import DomainError, InvalidArgumentError, LevelUnreachableError
from despeckle.common.i18n_utils import t
from despeckle.common.log_utils import LogUtils
from despeckle.forward.random_source import RandomSource
from despeckle.model.image_tensor import ImageTensor
from despeckle.sampler.sampler_models import DdimKernel, SamplerConfig
from despeckle.schedule.noise_schedule import NoiseSchedule, step_for_noise_level
from despeckle.score.base_score_model import ScoreModel

ZETA_RELATIVE_SLACK: float = 1e-12


def _draw(shape, rng: Optional[RandomSource], noise: Optional[np.ndarray]) -> np.ndarray:
    if noise is not None:
        return np.asarray(noise, dtype=np.float64)
    return rng.normal(shape)


def stochastic_step(y_k: np.ndarray, k: int, model: ScoreModel, s: NoiseSchedule,
                    rng: Optional[RandomSource], noise: Optional[np.ndarray] = None) -> np.ndarray:
    """
    用途说明：反向 SDE 的一步 Euler–Maruyama。
    入参说明：
        y_k (np.ndarray): 第 k 步状态。
        k (int): 1 ≤ k ≤ K。
        noise (np.ndarray, optional): 注入的 n，给定时不抽样。
    返回值说明：np.ndarray: 第 k−1 步状态。
    """
    s.check_step(k, lower=1)
    y_k = np.asarray(y_k, dtype=np.float64)
    delta = s.increment(k)
    n = _draw(y_k.shape, rng, noise)
    return y_k + 0.5 * delta * (1.0 + 2.0 * model.evaluate(y_k, k)) + np.sqrt(delta) * n


def ode_step(y_k: np.ndarray, k: int, model: ScoreModel, s: NoiseSchedule) -> np.ndarray:
    """
    用途说明：概率流 ODE 的一步 Euler，确定性。
    """
    s.check_step(k, lower=1)
    y_k = np.asarray(y_k, dtype=np.float64)
    delta = s.increment(k)
    return y_k + 0.5 * delta * (1.0 + model.evaluate(y_k, k))


def predict_y0(y_k: np.ndarray, k: int, model: ScoreModel, s: NoiseSchedule) -> np.ndarray:
    """
    用途说明：由当前状态与分数给出干净图像的最优估计 ŷ0 = y_k + ½η(k) + η(k)·s；k = 0 时原样返回。
    """
    s.check_step(k)
    y_k = np.asarray(y_k, dtype=np.float64)
    if k == 0:
        return y_k.copy()
    eta_k = s.eta_at(k)
    return y_k + 0.5 * eta_k + eta_k * model.evaluate(y_k, k)


def ddim_kernel(y_k: np.ndarray, k: int, model: ScoreModel, s: NoiseSchedule,
                zeta_k: float, k_prev: Optional[int] = None) -> DdimKernel:
    """
    用途说明：计算 DDIM 转移核的均值与方差。
    入参说明：
        zeta_k (float): ζ_k ≥ 0，须满足 ζ_k² ≤ η(k_prev)。
        k_prev (int, optional): 目标步，默认 k − 1。
    返回值说明：DdimKernel
    """
    s.check_step(k, lower=1)
    k_prev = int(k) - 1 if k_prev is None else int(k_prev)
    if not 0 <= k_prev < k:
        raise InvalidArgumentError(t('sampler_bad_prev_step', k=k, k_prev=k_prev))
    eta_k, eta_prev = s.eta_at(k), s.eta_at(k_prev)
    zeta_sq = float(zeta_k) ** 2
    # ζ 由 √η 构造时平方可能多出一个舍入误差
    if zeta_k < 0.0 or zeta_sq > eta_prev * (1.0 + ZETA_RELATIVE_SLACK):
        raise InvalidArgumentError(t('sampler_zeta_too_large', k=k, zeta_sq=zeta_sq, limit=eta_prev))

    y_k = np.asarray(y_k, dtype=np.float64)
    y0_hat = predict_y0(y_k, k, model, s)
    coefficient = np.sqrt(max(eta_prev - zeta_sq, 0.0)) / np.sqrt(eta_k)
    mu = y0_hat - 0.5 * eta_prev + coefficient * (y_k - y0_hat + 0.5 * eta_k)
    return DdimKernel(mu=mu, var=zeta_sq)


def ddim_step(y_k: np.ndarray, k: int, model: ScoreModel, s: NoiseSchedule, cfg: SamplerConfig,
              rng: Optional[RandomSource], noise: Optional[np.ndarray] = None,
              k_prev: Optional[int] = None) -> np.ndarray:
    """
    用途说明：DDIM 一步。ζ_k = 0 时确定性且不消耗随机数。
    入参说明：
        cfg (SamplerConfig): 提供 ζ 表与跳步间隔。
        k_prev (int, optional): 目标步，默认由 cfg.stride 决定。
    返回值说明：np.ndarray: 第 k_prev 步状态。
    """
    if k_prev is None:
        k_prev = cfg.previous_step(k)
    zeta_k = cfg.zeta_at(k)
    kernel = ddim_kernel(y_k, k, model, s, zeta_k, k_prev)
    if zeta_k > 0.0:
        return kernel.mu + zeta_k * _draw(kernel.mu.shape, rng, noise)
    return kernel.mu


def run_reverse(y: np.ndarray, k_start: int, model: ScoreModel, s: NoiseSchedule,
                cfg: SamplerConfig, rng: Optional[RandomSource]) -> np.ndarray:
    """
    用途说明：在对数域从 k_start 反向迭代到 0。
    返回值说明：np.ndarray: 第 0 步状态。
    """
    s.check_step(k_start)
    y = np.asarray(y, dtype=np.float64)
    for k in cfg.step_sequence(k_start):
        if cfg.method == "stochastic":
            y = stochastic_step(y, k, model, s, rng)
        elif cfg.method == "ode":
            y = ode_step(y, k, model, s)
        else:
            y = ddim_step(y, k, model, s, cfg, rng)
    return y


def resolve_start_step(s: NoiseSchedule, level: Optional[float] = None, k_start: Optional[int] = None) -> int:
    """
    用途说明：由噪声水平或显式步序号确定起始步；两者都给出时以步序号为准。
    """
    if k_start is not None:
        if int(k_start) > s.steps:
            raise LevelUnreachableError(t('sampler_start_unreachable', k=k_start, steps=s.steps, maximum=s.max_level))
        s.check_step(int(k_start))
        return int(k_start)
    if level is None:
        raise InvalidArgumentError(t('sampler_no_start'))
    return step_for_noise_level(s, level)


def denoise(x_noisy, model: ScoreModel, s: NoiseSchedule, cfg: SamplerConfig,
            rng: Optional[RandomSource], level: Optional[float] = None,
            k_start: Optional[int] = None) -> np.ndarray:
    """
    用途说明：完整的去噪流程：y ← log x，按配置的方法从 k_start 迭代到 1，返回 exp(y_0)。
    结果不截断，导出图像时才截断到 (0, 1]。k_start = 0 时原样返回输入。
    入参说明：
        x_noisy (np.ndarray | ImageTensor): 严格为正的加噪强度图。
        model (ScoreModel): 分数模型。
        s (NoiseSchedule): 日程。
        cfg (SamplerConfig): 采样配置；cfg.k_start 优先于 level。
        rng (RandomSource): 随机源（stochastic 或 ζ > 0 的 ddim 需要）。
        level (float, optional): 噪声方差。
        k_start (int, optional): 起始步。
    返回值说明：np.ndarray: 去噪后的强度图。
    """
    data = x_noisy.data if isinstance(x_noisy, ImageTensor) else x_noisy
    x = np.asarray(data, dtype=np.float64)
    if not np.all(np.isfinite(x)) or np.any(x <= 0.0):
        raise DomainError(t('image_not_positive'))

    start = resolve_start_step(s, level, k_start if k_start is not None else cfg.k_start)
    if start == 0:
        return x.copy()
    LogUtils.debug(t('sampler_denoise_start', method=cfg.method, k=start, stride=cfg.stride))
    return np.exp(run_reverse(np.log(x), start, model, s, cfg, rng))
