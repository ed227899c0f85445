"""
最小张量与反向模式自动微分内核。

每个由原语产生的张量挂一个 TapeNode（原语名、输入、保存的反向函数）。
Tape 从标量损失出发按拓扑序收集节点，反向时每个节点恰好访问一次；
中间梯度只存在于本次 Tape 中，叶子张量的 grad 跨多次 backward 累加。
"""
import threading
from contextlib import contextmanager
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from despeckle.common.errors import ContractError
from despeckle.common.i18n_utils import t

BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]

_grad_mode = threading.local()


def is_grad_enabled() -> bool:
    return getattr(_grad_mode, "enabled", True)


@contextmanager
def no_grad() -> Iterator[None]:
    """
    用途说明：线程局部地关闭梯度记录，用于只读推理；不同线程互不影响。
    """
    previous = is_grad_enabled()
    _grad_mode.enabled = False
    try:
        yield
    finally:
        _grad_mode.enabled = previous


class TapeNode:
    """
    用途：记录一次原语运算：原语名、输入张量与反向函数（闭包内保存了所需的前向中间量）。
    """
    __slots__ = ("primitive", "inputs", "backward_fn")

    def __init__(self, primitive: str, inputs: Tuple['Tensor', ...], backward_fn: BackwardFn) -> None:
        self.primitive: str = primitive
        self.inputs: Tuple['Tensor', ...] = inputs
        self.backward_fn: BackwardFn = backward_fn


class Tensor:
    """
    用途：连续存储的实数张量。
    入参说明：
        data (array-like): 数据，默认转换为 float64；参数张量可用 float32 存储。
        requires_grad (bool): 是否需要梯度。
        name (str): 参数名，用于检查点布局与诊断。
    """

    def __init__(self, data, requires_grad: bool = False, name: str = "", dtype=None) -> None:
        array = np.asarray(data, dtype=dtype if dtype is not None else np.float64)
        # 0 维数组天然连续，ascontiguousarray 会把它升为 1 维
        self.data: np.ndarray = array if array.flags.c_contiguous else np.ascontiguousarray(array)
        self.requires_grad: bool = bool(requires_grad)
        self.grad: Optional[np.ndarray] = None
        self.name: str = name
        self.node: Optional[TapeNode] = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return int(self.data.size)

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float("nan")

    def zero_grad(self) -> None:
        self.grad = None

    def accumulate_grad(self, grad: np.ndarray) -> None:
        if grad.shape != self.data.shape:
            raise ContractError(t('nn_grad_shape', name=self.name or "tensor", expected=self.data.shape, actual=grad.shape))
        self.grad = grad.copy() if self.grad is None else self.grad + grad

    def backward(self) -> None:
        backward(self)

    # 运算符重载委托给 ops 模块，延迟导入避免循环依赖
    def __add__(self, other):
        from despeckle.nn import ops
        return ops.add(self, other)

    def __radd__(self, other):
        from despeckle.nn import ops
        return ops.add(other, self)

    def __sub__(self, other):
        from despeckle.nn import ops
        return ops.sub(self, other)

    def __rsub__(self, other):
        from despeckle.nn import ops
        return ops.sub(other, self)

    def __mul__(self, other):
        from despeckle.nn import ops
        return ops.mul(self, other)

    def __rmul__(self, other):
        from despeckle.nn import ops
        return ops.mul(other, self)

    def __matmul__(self, other):
        from despeckle.nn import ops
        return ops.matmul(self, other)

    def __neg__(self):
        from despeckle.nn import ops
        return ops.mul(self, -1.0)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad}, name={self.name!r})"


def as_tensor(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def make_result(data: np.ndarray, primitive: str, inputs: Tuple[Tensor, ...], backward_fn: BackwardFn) -> Tensor:
    """
    用途说明：构造原语输出张量；任一输入需要梯度且处于记录模式时，把运算记录到 Tape 节点上。
    """
    out = Tensor(data, dtype=data.dtype if data.dtype in (np.float32, np.float64) else np.float64)
    if is_grad_enabled() and any(tensor.requires_grad for tensor in inputs):
        out.requires_grad = True
        out.node = TapeNode(primitive, inputs, backward_fn)
    return out


class Tape:
    """
    用途：从损失张量出发得到的有序运算记录（拓扑序）。反向时按逆拓扑序逐节点回放，每个节点恰好一次。
    """

    def __init__(self, root: Tensor) -> None:
        self.root: Tensor = root
        self.order: List[Tensor] = self._topological_order(root)

    @staticmethod
    def _topological_order(root: Tensor) -> List[Tensor]:
        order: List[Tensor] = []
        visited: set = set()
        # 迭代式 DFS，避免深网络触发递归上限
        stack: List[Tuple[Tensor, bool]] = [(root, False)]
        while stack:
            tensor, expanded = stack.pop()
            if expanded:
                order.append(tensor)
                continue
            if id(tensor) in visited:
                continue
            visited.add(id(tensor))
            stack.append((tensor, True))
            if tensor.node is not None:
                for parent in tensor.node.inputs:
                    if parent.requires_grad and id(parent) not in visited:
                        stack.append((parent, False))
        return order

    def backward(self) -> None:
        grads: Dict[int, np.ndarray] = {id(self.root): np.ones_like(self.root.data, dtype=np.float64)}
        for tensor in reversed(self.order):
            grad = grads.pop(id(tensor), None)
            if grad is None:
                continue
            if tensor.node is None:
                # 叶子张量：梯度累加到 .grad
                tensor.accumulate_grad(grad.astype(np.float64, copy=False))
                continue
            input_grads = tensor.node.backward_fn(grad)
            for parent, parent_grad in zip(tensor.node.inputs, input_grads):
                if parent_grad is None or not parent.requires_grad:
                    continue
                key = id(parent)
                grads[key] = parent_grad if key not in grads else grads[key] + parent_grad


def backward(loss: Tensor) -> None:
    """
    用途说明：对标量损失做反向传播，把 ∂loss/∂param 累加到所有需要梯度的叶子张量上。
    入参说明：loss (Tensor): 经由原语得到的标量张量。
    返回值说明：无
    """
    if loss.data.size != 1:
        raise ContractError(t('nn_backward_not_scalar', shape=loss.shape))
    if not loss.requires_grad:
        return
    Tape(loss).backward()
