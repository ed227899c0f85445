from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from despeckle.common.errors import ContractError
from despeckle.common.i18n_utils import t
from despeckle.nn.tensor import Tensor


@dataclass
class AdamState:
    """
    用途：Adam 优化器状态。m、v 为与参数逐一对应的一阶/二阶矩缓冲（float64），step 为已执行步数。
    """
    step: int = 0
    m: List[np.ndarray] = field(default_factory=list)
    v: List[np.ndarray] = field(default_factory=list)

    @classmethod
    def for_parameters(cls, params: Sequence[Tensor]) -> 'AdamState':
        """用途说明：按参数形状创建全零矩缓冲。"""
        return cls(step=0,
                   m=[np.zeros(p.shape, dtype=np.float64) for p in params],
                   v=[np.zeros(p.shape, dtype=np.float64) for p in params])


def adam_step(params: Sequence[Tensor], grads: Sequence[Optional[np.ndarray]], state: AdamState,
              lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> None:
    """
    用途说明：带偏差修正的标准 Adam 更新，原地修改参数数据与状态，state.step 加一。
    梯度为 None 的参数视为零梯度。
    入参说明：
        params (Sequence[Tensor]): 参数张量。
        grads (Sequence[np.ndarray]): 与参数同序同形状的梯度。
        state (AdamState): 优化器状态；空状态会按参数形状惰性创建。
        lr (float): 学习率。
    返回值说明：无
    """
    if not state.m and not state.v and state.step == 0:
        state.m = [np.zeros(p.shape, dtype=np.float64) for p in params]
        state.v = [np.zeros(p.shape, dtype=np.float64) for p in params]
    if len(grads) != len(params) or len(state.m) != len(params) or len(state.v) != len(params):
        raise ContractError(t('adam_count_mismatch', params=len(params), grads=len(grads), moments=len(state.m)))

    for index, (param, grad, m, v) in enumerate(zip(params, grads, state.m, state.v)):
        if m.shape != param.shape or v.shape != param.shape or (grad is not None and grad.shape != param.shape):
            raise ContractError(t('adam_shape_mismatch', index=index, name=param.name or "param",
                                  expected=param.shape, actual=m.shape if grad is None else grad.shape))

    state.step += 1
    correction1 = 1.0 - beta1 ** state.step
    correction2 = 1.0 - beta2 ** state.step
    for param, grad, m, v in zip(params, grads, state.m, state.v):
        g = np.zeros(param.shape, dtype=np.float64) if grad is None else np.asarray(grad, dtype=np.float64)
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * g * g
        update = lr * (m / correction1) / (np.sqrt(v / correction2) + eps)
        param.data[...] = (param.data.astype(np.float64) - update).astype(param.data.dtype)
