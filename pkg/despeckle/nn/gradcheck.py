"""
中心差分梯度校验：比较反向传播得到的梯度与 (f(θ+h) − f(θ−h)) / 2h。
只应在 float64 参数上使用。
"""
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from despeckle.forward.random_source import RandomSource
from despeckle.nn.tensor import Tensor, backward, no_grad

FD_STEP: float = 1e-4
REL_TOLERANCE: float = 1e-4
# 梯度绝对值很小时相对误差由差分舍入主导，此时按绝对误差判定
ABS_FLOOR: float = 1e-7


@dataclass
class GradCheckReport:
    """
    用途：一次梯度校验的结果。
    入参说明：
        max_error (float): 所有被检元素上的最大归一化误差 |a − n| / max(|a|, |n|, ABS_FLOOR/REL_TOLERANCE)。
        checked (int): 被检元素数。
        worst (str): 误差最大的参数名与下标。
    """
    max_error: float
    checked: int
    worst: str

    @property
    def passed(self) -> bool:
        return self.max_error < REL_TOLERANCE


def check_gradients(loss_fn: Callable[[], Tensor], params: Sequence[Tensor],
                    rng: Optional[RandomSource] = None, max_entries: int = 0,
                    h: float = FD_STEP) -> GradCheckReport:
    """
    用途说明：对 params 中的元素做中心差分校验。
    入参说明：
        loss_fn (Callable[[], Tensor]): 每次调用都从当前参数重新计算标量损失。
        params (Sequence[Tensor]): 待检参数（float64）。
        rng (RandomSource, optional): 与 max_entries 一起用于抽检元素。
        max_entries (int): 每个参数最多抽检的元素数，0 表示全部。
        h (float): 差分步长。
    返回值说明：GradCheckReport
    """
    for param in params:
        param.zero_grad()
    backward(loss_fn())
    analytic = [np.zeros(p.shape) if p.grad is None else p.grad.copy() for p in params]

    max_error, checked, worst = 0.0, 0, ""
    scale_floor = ABS_FLOOR / REL_TOLERANCE
    for param_index, (param, grad) in enumerate(zip(params, analytic)):
        flat = param.data.reshape(-1)
        indices = np.arange(flat.size)
        if max_entries and flat.size > max_entries:
            picker = rng if rng is not None else RandomSource(0)
            indices = np.sort(picker.permutation(flat.size)[:max_entries])

        for index in indices:
            original = flat[index]
            with no_grad():
                flat[index] = original + h
                plus = loss_fn().item()
                flat[index] = original - h
                minus = loss_fn().item()
            flat[index] = original
            numeric = (plus - minus) / (2.0 * h)
            exact = grad.reshape(-1)[index]
            error = abs(exact - numeric) / max(abs(exact), abs(numeric), scale_floor)
            checked += 1
            if error > max_error:
                max_error = error
                worst = f"{param.name or f'param{param_index}'}[{int(index)}]"

    return GradCheckReport(max_error=float(max_error), checked=checked, worst=worst)
