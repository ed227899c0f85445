"""
自动微分原语：add, sub, mul, matmul, conv2d(3×3, 步长 1, 填充 1), avgpool2, upsample2,
silu, relu, 逐通道归一化, 时间嵌入广播加, sum, mean, square。

形状不符时抛出 ShapeError 并写明原语名。
"""
from typing import Optional, Tuple

import numpy as np
from scipy.special import expit

from despeckle.common.errors import ShapeError
from despeckle.common.i18n_utils import t
from despeckle.nn.tensor import Tensor, as_tensor, make_result

NORM_EPS: float = 1e-5


def _shape_error(primitive: str, *shapes: Tuple[int, ...]) -> ShapeError:
    return ShapeError(t('nn_shape_mismatch', primitive=primitive, shapes=", ".join(str(s) for s in shapes)))


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """
    用途说明：把广播后的梯度求和还原到原始形状。
    """
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _broadcast_shape(primitive: str, a: Tensor, b: Tensor) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise _shape_error(primitive, a.shape, b.shape) from None


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("add", a, b)

    def backward_fn(grad: np.ndarray):
        return _unbroadcast(grad, a.shape), _unbroadcast(grad, b.shape)

    return make_result(a.data + b.data, "add", (a, b), backward_fn)


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("sub", a, b)

    def backward_fn(grad: np.ndarray):
        return _unbroadcast(grad, a.shape), _unbroadcast(-grad, b.shape)

    return make_result(a.data - b.data, "sub", (a, b), backward_fn)


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("mul", a, b)

    def backward_fn(grad: np.ndarray):
        return _unbroadcast(grad * b.data, a.shape), _unbroadcast(grad * a.data, b.shape)

    return make_result(a.data * b.data, "mul", (a, b), backward_fn)


def matmul(a, b) -> Tensor:
    """
    用途说明：二维矩阵乘 [N, D] @ [D, M]。
    """
    a, b = as_tensor(a), as_tensor(b)
    if a.data.ndim != 2 or b.data.ndim != 2 or a.shape[1] != b.shape[0]:
        raise _shape_error("matmul", a.shape, b.shape)

    def backward_fn(grad: np.ndarray):
        return grad @ b.data.T, a.data.T @ grad

    return make_result(a.data @ b.data, "matmul", (a, b), backward_fn)


def _im2col3x3(x: np.ndarray) -> np.ndarray:
    """
    用途说明：把 [N, C, H, W] 零填充后展开为 [N, H, W, C, 3, 3] 的连续窗口。
    """
    padded = np.pad(x, ((0, 0), (0, 0), (1, 1), (1, 1)))
    windows = np.lib.stride_tricks.sliding_window_view(padded, (3, 3), axis=(2, 3))
    return np.ascontiguousarray(windows.transpose(0, 2, 3, 1, 4, 5))


def conv2d(x, weight, bias=None) -> Tensor:
    """
    用途说明：3×3 卷积，步长 1，零填充 1，输出空间尺寸不变。
    入参说明：
        x (Tensor): [N, C_in, H, W]
        weight (Tensor): [C_out, C_in, 3, 3]
        bias (Tensor, optional): [C_out]
    返回值说明：Tensor: [N, C_out, H, W]
    """
    x, weight = as_tensor(x), as_tensor(weight)
    if x.data.ndim != 4 or weight.data.ndim != 4 or weight.shape[2:] != (3, 3) or weight.shape[1] != x.shape[1]:
        raise _shape_error("conv2d", x.shape, weight.shape)
    n, c_in, h, w = x.shape
    c_out = weight.shape[0]

    cols = _im2col3x3(x.data).reshape(n * h * w, c_in * 9)
    w_mat = weight.data.reshape(c_out, c_in * 9)
    out = (cols @ w_mat.T).reshape(n, h, w, c_out).transpose(0, 3, 1, 2)

    inputs: Tuple[Tensor, ...] = (x, weight)
    if bias is not None:
        bias = as_tensor(bias)
        if bias.shape != (c_out,):
            raise _shape_error("conv2d", x.shape, weight.shape, bias.shape)
        out = out + bias.data.reshape(1, c_out, 1, 1)
        inputs = (x, weight, bias)

    def backward_fn(grad: np.ndarray):
        grad_rows = grad.transpose(0, 2, 3, 1).reshape(n * h * w, c_out)
        grad_weight = (grad_rows.T @ cols).reshape(weight.shape)
        grad_cols = (grad_rows @ w_mat).reshape(n, h, w, c_in, 3, 3)
        grad_padded = np.zeros((n, c_in, h + 2, w + 2), dtype=np.float64)
        for i in range(3):
            for j in range(3):
                grad_padded[:, :, i:i + h, j:j + w] += grad_cols[:, :, :, :, i, j].transpose(0, 3, 1, 2)
        grad_x = grad_padded[:, :, 1:h + 1, 1:w + 1]
        if bias is None:
            return grad_x, grad_weight
        return grad_x, grad_weight, grad.sum(axis=(0, 2, 3))

    return make_result(np.ascontiguousarray(out), "conv2d", inputs, backward_fn)


def avgpool2(x) -> Tensor:
    """
    用途说明：2×2 平均池化，要求 H、W 为偶数。
    """
    x = as_tensor(x)
    if x.data.ndim != 4 or x.shape[2] % 2 or x.shape[3] % 2:
        raise _shape_error("avgpool2", x.shape)
    n, c, h, w = x.shape
    out = x.data.reshape(n, c, h // 2, 2, w // 2, 2).mean(axis=(3, 5))

    def backward_fn(grad: np.ndarray):
        return (np.repeat(np.repeat(grad, 2, axis=2), 2, axis=3) * 0.25,)

    return make_result(out, "avgpool2", (x,), backward_fn)


def upsample2(x) -> Tensor:
    """
    用途说明：最近邻 2 倍上采样。
    """
    x = as_tensor(x)
    if x.data.ndim != 4:
        raise _shape_error("upsample2", x.shape)
    n, c, h, w = x.shape
    out = np.repeat(np.repeat(x.data, 2, axis=2), 2, axis=3)

    def backward_fn(grad: np.ndarray):
        return (grad.reshape(n, c, h, 2, w, 2).sum(axis=(3, 5)),)

    return make_result(out, "upsample2", (x,), backward_fn)


def silu(x) -> Tensor:
    x = as_tensor(x)
    sig = expit(x.data)

    def backward_fn(grad: np.ndarray):
        return (grad * (sig + x.data * sig * (1.0 - sig)),)

    return make_result(x.data * sig, "silu", (x,), backward_fn)


def relu(x) -> Tensor:
    x = as_tensor(x)
    mask = x.data > 0.0

    def backward_fn(grad: np.ndarray):
        return (grad * mask,)

    return make_result(np.where(mask, x.data, 0.0), "relu", (x,), backward_fn)


def channel_norm(x, eps: float = NORM_EPS) -> Tensor:
    """
    用途说明：无分组、无仿射的逐通道归一化：对每个样本每个通道在 H×W 上减均值除标准差。
    """
    x = as_tensor(x)
    if x.data.ndim != 4:
        raise _shape_error("channel_norm", x.shape)
    data = x.data.astype(np.float64, copy=False)
    count = data.shape[2] * data.shape[3]
    mean = data.mean(axis=(2, 3), keepdims=True)
    centered = data - mean
    inv_std = 1.0 / np.sqrt((centered ** 2).mean(axis=(2, 3), keepdims=True) + eps)
    normalized = centered * inv_std

    def backward_fn(grad: np.ndarray):
        grad_sum = grad.sum(axis=(2, 3), keepdims=True)
        grad_dot = (grad * normalized).sum(axis=(2, 3), keepdims=True)
        return (inv_std / count * (count * grad - grad_sum - normalized * grad_dot),)

    return make_result(normalized, "channel_norm", (x,), backward_fn)


def add_channel_bias(x, embedding) -> Tensor:
    """
    用途说明：把 [N, C] 的时间嵌入投影广播加到 [N, C, H, W] 特征图上。
    """
    x, embedding = as_tensor(x), as_tensor(embedding)
    if x.data.ndim != 4 or embedding.shape != x.shape[:2]:
        raise _shape_error("add_channel_bias", x.shape, embedding.shape)

    def backward_fn(grad: np.ndarray):
        return grad, grad.sum(axis=(2, 3))

    return make_result(x.data + embedding.data[:, :, None, None], "add_channel_bias", (x, embedding), backward_fn)


def reduce_sum(x, axis: Optional[Tuple[int, ...]] = None) -> Tensor:
    x = as_tensor(x)
    out = np.asarray(x.data.sum(axis=axis, dtype=np.float64))

    def backward_fn(grad: np.ndarray):
        if axis is None:
            return (np.broadcast_to(grad, x.shape).astype(np.float64),)
        return (np.broadcast_to(np.expand_dims(grad, axis), x.shape).astype(np.float64),)

    return make_result(out, "sum", (x,), backward_fn)


def mean(x) -> Tensor:
    """
    用途说明：全元素均值，64 位累加。
    """
    x = as_tensor(x)
    count = x.size

    def backward_fn(grad: np.ndarray):
        return (np.full(x.shape, float(grad) / count, dtype=np.float64),)

    return make_result(np.asarray(x.data.mean(dtype=np.float64)), "mean", (x,), backward_fn)


def square(x) -> Tensor:
    x = as_tensor(x)

    def backward_fn(grad: np.ndarray):
        return (2.0 * grad * x.data,)

    return make_result(x.data * x.data, "square", (x,), backward_fn)


def reshape(x, shape: Tuple[int, ...]) -> Tensor:
    x = as_tensor(x)
    try:
        out = x.data.reshape(shape)
    except ValueError:
        raise _shape_error("reshape", x.shape, tuple(shape)) from None

    def backward_fn(grad: np.ndarray):
        return (grad.reshape(x.shape),)

    return make_result(out, "reshape", (x,), backward_fn)
