from typing import Any, Dict, Tuple

import numpy as np

from despeckle.forward.random_source import RandomSource, StreamId


class GaussianToyDataset:
    """
    用途：合成的逐元素高斯数据 y0 ~ N(mu, var)，直接给出对数域样本，
    其前向边缘分布与分数都有闭式解，用于学习正确性校验。
    入参说明：
        seed (int): 种子。
        mu (float): 均值。
        var (float): 方差。
        item_shape (Tuple[int, ...]): 单个样本的形状，默认标量 "图像" (1,)。
        items_per_epoch (int): 一轮包含的样本数。
    """

    def __init__(self, seed: int, mu: float = 0.0, var: float = 1.0,
                 item_shape: Tuple[int, ...] = (1,), items_per_epoch: int = 1024) -> None:
        self.rng: RandomSource = RandomSource(seed, StreamId.TRAIN_DATA)
        self.mu: float = float(mu)
        self.var: float = float(var)
        self.item_shape: Tuple[int, ...] = tuple(item_shape)
        self.items_per_epoch: int = int(items_per_epoch)

    def next_log_batch(self, batch_size: int) -> np.ndarray:
        return self.mu + np.sqrt(self.var) * self.rng.normal((int(batch_size),) + self.item_shape)

    def rng_state(self) -> Dict[str, Any]:
        return self.rng.get_state()
