from typing import Dict, List, Tuple

import numpy as np

from despeckle.forward.random_source import RandomSource
from despeckle.nn import ops
from despeckle.nn.tensor import Tensor


class Module:
    """
    用途：参数容器基类。参数与子模块按注册顺序排列，该顺序即检查点中参数块的顺序。
    """

    def __init__(self) -> None:
        self._parameters: Dict[str, Tensor] = {}
        self._children: Dict[str, 'Module'] = {}

    def register_parameter(self, name: str, tensor: Tensor) -> Tensor:
        tensor.name = name
        self._parameters[name] = tensor
        return tensor

    def register_child(self, name: str, module: 'Module') -> 'Module':
        self._children[name] = module
        return module

    def named_parameters(self, prefix: str = "") -> List[Tuple[str, Tensor]]:
        result: List[Tuple[str, Tensor]] = [(prefix + name, tensor) for name, tensor in self._parameters.items()]
        for child_name, child in self._children.items():
            result.extend(child.named_parameters(f"{prefix}{child_name}."))
        return result

    def parameters(self) -> List[Tensor]:
        return [tensor for _, tensor in self.named_parameters()]

    def parameter_count(self) -> int:
        return int(sum(tensor.size for tensor in self.parameters()))

    def zero_grad(self) -> None:
        for tensor in self.parameters():
            tensor.zero_grad()


def _uniform_parameter(shape: Tuple[int, ...], fan_in: int, rng: RandomSource, dtype) -> Tensor:
    # 按 fan-in 缩放的均匀初始化
    bound = 1.0 / np.sqrt(fan_in)
    return Tensor(rng.uniform(-bound, bound, size=shape), requires_grad=True, dtype=dtype)


class Conv2d(Module):
    """
    用途：3×3 卷积层（步长 1，填充 1）。zero_init 为 True 时权重与偏置全零。
    """

    def __init__(self, in_channels: int, out_channels: int, rng: RandomSource,
                 zero_init: bool = False, dtype=np.float32) -> None:
        super().__init__()
        shape = (out_channels, in_channels, 3, 3)
        if zero_init:
            weight = Tensor(np.zeros(shape), requires_grad=True, dtype=dtype)
            bias = Tensor(np.zeros(out_channels), requires_grad=True, dtype=dtype)
        else:
            fan_in = in_channels * 9
            weight = _uniform_parameter(shape, fan_in, rng, dtype)
            bias = _uniform_parameter((out_channels,), fan_in, rng, dtype)
        self.weight: Tensor = self.register_parameter("weight", weight)
        self.bias: Tensor = self.register_parameter("bias", bias)

    def __call__(self, x: Tensor) -> Tensor:
        return ops.conv2d(x, self.weight, self.bias)


class Linear(Module):
    """
    用途：仿射层 x @ W + b，W 形状 [in, out]。
    """

    def __init__(self, in_features: int, out_features: int, rng: RandomSource,
                 zero_init: bool = False, dtype=np.float32) -> None:
        super().__init__()
        if zero_init:
            weight = Tensor(np.zeros((in_features, out_features)), requires_grad=True, dtype=dtype)
            bias = Tensor(np.zeros(out_features), requires_grad=True, dtype=dtype)
        else:
            weight = _uniform_parameter((in_features, out_features), in_features, rng, dtype)
            bias = _uniform_parameter((out_features,), in_features, rng, dtype)
        self.weight: Tensor = self.register_parameter("weight", weight)
        self.bias: Tensor = self.register_parameter("bias", bias)

    def __call__(self, x: Tensor) -> Tensor:
        return ops.add(ops.matmul(x, self.weight), self.bias)


class ResidualBlock(Module):
    """
    用途：带时间条件的残差块：norm → silu → conv，加上时间嵌入的逐通道仿射投影，再 norm → silu → conv，最后残差相加。
    """

    def __init__(self, channels: int, embedding_dim: int, rng: RandomSource, dtype=np.float32) -> None:
        super().__init__()
        self.conv1: Conv2d = self.register_child("conv1", Conv2d(channels, channels, rng, dtype=dtype))
        self.time_proj: Linear = self.register_child("time_proj", Linear(embedding_dim, channels, rng, dtype=dtype))
        self.conv2: Conv2d = self.register_child("conv2", Conv2d(channels, channels, rng, dtype=dtype))

    def __call__(self, x: Tensor, embedding: Tensor) -> Tensor:
        h = self.conv1(ops.silu(ops.channel_norm(x)))
        h = ops.add_channel_bias(h, self.time_proj(embedding))
        h = self.conv2(ops.silu(ops.channel_norm(h)))
        return ops.add(x, h)
