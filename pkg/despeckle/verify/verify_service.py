"""
自检属性集：在合成数据上用解析分数 oracle 校验前向核、鞅性质、路径等价、精确分数恢复、
DDIM 边缘保持与自动微分梯度。
"""
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np
from scipy.stats import ks_2samp

from despeckle.common.errors import InvalidArgumentError
from despeckle.common.i18n_utils import t
from despeckle.common.log_utils import LogUtils
from despeckle.forward.forward_process import ITO_DRIFT, corrupt_intensity, corrupt_log, simulate_forward_path
from despeckle.forward.random_source import RandomSource, StreamId
from despeckle.nn import ops
from despeckle.nn.gradcheck import check_gradients
from despeckle.nn.score_net import ScoreNetConfig, build_score_network
from despeckle.nn.tensor import Tensor
from despeckle.sampler.sampler_models import SamplerConfig
from despeckle.sampler.samplers import ddim_step, predict_y0, run_reverse
from despeckle.schedule.noise_schedule import NoiseSchedule, build_linear_schedule
from despeckle.score.analytic_score import DeltaScoreModel

STANDARD_ERRORS: float = 5.0
# 两样本 KS 检验 1% 显著性水平的渐近系数
KS_COEFFICIENT_1PCT: float = 1.628
EXACT_TOLERANCE: float = 1e-12
ODE_TOLERANCE: float = 1e-3
# 每个参数张量抽检的元素数
GRADIENT_ENTRIES: int = 24
FAULTS = ("drift-sign",)


@dataclass
class PropertyResult:
    """
    用途：单项属性的校验结果。measured 与 threshold 同量纲，passed 为 measured < threshold。
    """
    name: str
    passed: bool
    measured: float
    threshold: float


def _result(name: str, measured: float, threshold: float) -> PropertyResult:
    return PropertyResult(name=name, passed=bool(measured < threshold), measured=float(measured),
                          threshold=float(threshold))


class VerifyService:
    """
    用途：运行全部自检属性。
    入参说明：
        seed (int): 种子，每个属性使用独立的子随机流。
        samples (int): 蒙特卡洛样本数。
        inject_fault (str, optional): 负对照；drift-sign 翻转前向漂移符号，鞅性质检查应失败。
    """

    def __init__(self, seed: int = 0, samples: int = 100_000, inject_fault: Optional[str] = None) -> None:
        if inject_fault is not None and inject_fault not in FAULTS:
            raise InvalidArgumentError(t('verify_unknown_fault', fault=inject_fault, choices=",".join(FAULTS)))
        self.seed: int = int(seed)
        self.samples: int = int(samples)
        self.inject_fault: Optional[str] = inject_fault
        self.schedule: NoiseSchedule = build_linear_schedule()
        self._root: RandomSource = RandomSource(self.seed, StreamId.VERIFY)
        self.properties: Dict[str, Callable[[RandomSource], List[PropertyResult]]] = {
            "forward_kernel": self.check_forward_kernel,
            "martingale": self.check_martingale,
            "path_equivalence": self.check_path_equivalence,
            "exact_score_predict_y0": self.check_predict_y0,
            "exact_score_ddim": self.check_ddim_recovery,
            "exact_score_ode": self.check_ode_recovery,
            "ddim_marginal": self.check_ddim_marginal,
            "gradient_check": self.check_gradients,
        }

    @property
    def drift(self) -> float:
        return -ITO_DRIFT if self.inject_fault == "drift-sign" else ITO_DRIFT

    def run_all(self) -> List[PropertyResult]:
        results: List[PropertyResult] = []
        for index, (name, check) in enumerate(self.properties.items()):
            for result in check(self._root.child(index)):
                LogUtils.progress(t('verify_property', name=result.name,
                                    status="pass" if result.passed else "FAIL",
                                    measured=result.measured, threshold=result.threshold))
                results.append(result)
        return results

    def check_forward_kernel(self, rng: RandomSource) -> List[PropertyResult]:
        """k=200 处 y0=0 的标量抽样，均值与方差落在 5 个标准误内。"""
        k, n = 200, self.samples
        eta_k = self.schedule.eta_at(k)
        y = corrupt_log(np.zeros(n), k, self.schedule, rng, drift=self.drift).y_k
        mean_se = np.sqrt(eta_k / n)
        var_se = eta_k * np.sqrt(2.0 / (n - 1))
        return [
            _result("forward_kernel_mean", abs(y.mean() + 0.5 * eta_k) / mean_se, STANDARD_ERRORS),
            _result("forward_kernel_variance", abs(y.var(ddof=1) - eta_k) / var_se, STANDARD_ERRORS),
        ]

    def check_martingale(self, rng: RandomSource) -> List[PropertyResult]:
        """强度域均值守恒：k ∈ {100, 200, 300}，x0 = 0.5。"""
        x0, worst = 0.5, 0.0
        for index, k in enumerate((100, 200, 300)):
            x_k, _ = corrupt_intensity(np.full(self.samples, x0), k, self.schedule, rng.child(index),
                                       drift=self.drift)
            standard_error = x_k.std(ddof=1) / np.sqrt(self.samples)
            worst = max(worst, abs(x_k.mean() - x0) / standard_error)
        return [_result("martingale", worst, STANDARD_ERRORS)]

    def check_path_equivalence(self, rng: RandomSource) -> List[PropertyResult]:
        """逐步递推与闭式加噪在 k=200 处的两样本 KS 统计量低于 1% 临界值。"""
        k, n = 200, self.samples
        closed = corrupt_log(np.zeros(n), k, self.schedule, rng.child(0)).y_k
        path = simulate_forward_path(np.zeros(n), k, self.schedule, rng.child(1))
        statistic = ks_2samp(closed, path).statistic
        return [_result("path_equivalence", statistic, KS_COEFFICIENT_1PCT * np.sqrt(2.0 / n))]

    def _delta_setup(self, rng: RandomSource, k: int):
        y0 = np.log(rng.uniform(0.05, 1.0, size=(1, 8, 8)))
        y_k = corrupt_log(y0, k, self.schedule, rng).y_k
        return y0, y_k, DeltaScoreModel(y0, self.schedule)

    def check_predict_y0(self, rng: RandomSource) -> List[PropertyResult]:
        worst = 0.0
        for index, k in enumerate((1, 100, 300, 500)):
            y0, y_k, model = self._delta_setup(rng.child(index), k)
            worst = max(worst, float(np.max(np.abs(predict_y0(y_k, k, model, self.schedule) - y0))))
        return [_result("exact_score_predict_y0", worst, EXACT_TOLERANCE)]

    def check_ddim_recovery(self, rng: RandomSource) -> List[PropertyResult]:
        k_start = 300
        y0, y_k, model = self._delta_setup(rng, k_start)
        y = run_reverse(y_k, k_start, model, self.schedule, SamplerConfig(method="ddim"), None)
        return [_result("exact_score_ddim", float(np.max(np.abs(y - y0))), EXACT_TOLERANCE)]

    def check_ode_recovery(self, rng: RandomSource) -> List[PropertyResult]:
        """从前向核的众数 y0 − ½η(k) 出发的完整 ODE 反向过程。"""
        k_start = 300
        y0, _, model = self._delta_setup(rng, k_start)
        mode = y0 - 0.5 * self.schedule.eta_at(k_start)
        y = run_reverse(mode, k_start, model, self.schedule, SamplerConfig(method="ode"), None)
        return [_result("exact_score_ode", float(np.max(np.abs(y - y0))), ODE_TOLERANCE)]

    def check_ddim_marginal(self, rng: RandomSource) -> List[PropertyResult]:
        """单步 DDIM 输出的均值与方差应与 k−1 步的前向核一致。"""
        n, y0_value, worst = self.samples, 0.3, 0.0
        y0 = np.full(n, y0_value)
        model = DeltaScoreModel(y0_value, self.schedule)
        case = 0
        for k in (50, 200, 400):
            eta_prev = self.schedule.eta_at(k - 1)
            for zeta_sq in (0.0, 0.5 * eta_prev):
                zeta = np.zeros(self.schedule.steps + 1)
                zeta[k] = np.sqrt(zeta_sq)
                cfg = SamplerConfig(method="ddim", zeta=zeta)
                y_k = corrupt_log(y0, k, self.schedule, rng.child(2 * case)).y_k
                out = ddim_step(y_k, k, model, self.schedule, cfg, rng.child(2 * case + 1))
                mean_z = abs(out.mean() - (y0_value - 0.5 * eta_prev)) / np.sqrt(eta_prev / n)
                var_z = abs(out.var(ddof=1) - eta_prev) / (eta_prev * np.sqrt(2.0 / (n - 1)))
                worst = max(worst, mean_z, var_z)
                case += 1
        return [_result("ddim_marginal", worst, STANDARD_ERRORS)]

    def check_gradients(self, rng: RandomSource) -> List[PropertyResult]:
        """float64 小网络的中心差分梯度校验；输出层先随机化，避免零初始化掩盖上游梯度。"""
        network = build_score_network(ScoreNetConfig(kind="unet", channels=1, widths=[4, 8],
                                                     embedding_dim=8, seed=self.seed), dtype=np.float64)
        out_conv = network.out_conv
        out_conv.weight.data[...] = rng.uniform(-0.3, 0.3, size=out_conv.weight.shape)
        out_conv.bias.data[...] = rng.uniform(-0.3, 0.3, size=out_conv.bias.shape)
        y = Tensor(rng.normal((2, 1, 4, 4)))
        target = rng.normal((2, 1, 4, 4))
        ks = np.array([10, 250])

        def loss_fn() -> Tensor:
            return ops.mean(ops.square(ops.sub(network.forward(y, ks), target)))

        report = check_gradients(loss_fn, network.parameters(), rng=rng.child(0), max_entries=GRADIENT_ENTRIES)
        return [_result("gradient_check", report.max_error, 1e-4)]
