from typing import Any, Dict, Tuple

import numpy as np


class StreamId:
    """
    用途说明：固定的随机流编号。所有随机性都源自同一个 --seed，按用途派生互不重叠的流。
    """
    CORRUPT: int = 1
    TRAIN_DATA: int = 2
    TRAIN_NOISE: int = 3
    TRAIN_STEPS: int = 4
    NETWORK_INIT: int = 5
    SAMPLER: int = 6
    VERIFY: int = 7
    BENCHMARK: int = 8


class RandomSource:
    """
    用途说明：基于计数器的可复现随机源（Philox），相同 (seed, stream) 在任何平台产生相同序列。
    入参说明：
        seed (int): 64 位种子。
        stream (int): 64 位流编号。
    """

    def __init__(self, seed: int, stream: int = 0) -> None:
        self.seed: int = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.stream: int = int(stream) & 0xFFFFFFFFFFFFFFFF
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,))
        self._generator: np.random.Generator = np.random.Generator(np.random.Philox(sequence))

    def normal(self, shape: Tuple[int, ...]) -> np.ndarray:
        """
        用途说明：抽取标准正态样本 N(0, I)，float64。
        """
        return self._generator.standard_normal(size=shape)

    def integers(self, low: int, high: int, size: Any = None) -> np.ndarray:
        """
        用途说明：抽取 [low, high] 闭区间上的均匀整数。
        """
        return self._generator.integers(low, high, size=size, endpoint=True)

    def uniform(self, low: float, high: float, size: Any = None) -> np.ndarray:
        return self._generator.uniform(low, high, size=size)

    def permutation(self, n: int) -> np.ndarray:
        return self._generator.permutation(n)

    def child(self, index: int) -> 'RandomSource':
        """
        用途说明：为并行任务（例如第 index 张图像）派生独立的子流，结果与调度顺序无关。
        """
        return RandomSource(self.seed, (self.stream << 20) + int(index) + 1)

    def get_state(self) -> Dict[str, Any]:
        """
        用途说明：导出可 JSON 序列化的生成器状态，用于检查点。
        返回值说明：Dict[str, Any]
        """
        state = self._generator.bit_generator.state
        return {
            "seed": self.seed,
            "stream": self.stream,
            "bit_generator": state["bit_generator"],
            "counter": [int(v) for v in state["state"]["counter"]],
            "key": [int(v) for v in state["state"]["key"]],
            "buffer": [int(v) for v in state["buffer"]],
            "buffer_pos": int(state["buffer_pos"]),
            "has_uint32": int(state["has_uint32"]),
            "uinteger": int(state["uinteger"]),
        }

    @classmethod
    def from_state(cls, data: Dict[str, Any]) -> 'RandomSource':
        """
        用途说明：由 get_state 的输出恢复随机源，恢复后继续产生与原对象相同的序列。
        """
        source = cls(int(data["seed"]), int(data["stream"]))
        source._generator.bit_generator.state = {
            "bit_generator": data["bit_generator"],
            "state": {
                "counter": np.array(data["counter"], dtype=np.uint64),
                "key": np.array(data["key"], dtype=np.uint64),
            },
            "buffer": np.array(data["buffer"], dtype=np.uint64),
            "buffer_pos": int(data["buffer_pos"]),
            "has_uint32": int(data["has_uint32"]),
            "uinteger": int(data["uinteger"]),
        }
        return source
