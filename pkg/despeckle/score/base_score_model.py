from abc import ABC, abstractmethod

import numpy as np

from despeckle.nn.tensor import Tensor


class ScoreModel(ABC):
    """
    用途：分数模型接口，把 (y_k, k) 映射为 ∇log p_k(y_k) 的估计。解析 oracle 与训练得到的网络都实现此接口。
    """

    @abstractmethod
    def evaluate(self, y: np.ndarray, k: int) -> np.ndarray:
        """
        用途：计算第 k 步的分数估计。
        入参说明：
            y (np.ndarray): 对数域状态，任意形状。
            k (int): 步序号。
        返回值说明：
            np.ndarray: 与 y 同形状的分数估计，k ≥ 1 时元素有限。
        """
        pass

    def __call__(self, y: np.ndarray, k: int) -> np.ndarray:
        return self.evaluate(y, k)

    def score_batch(self, y_batch: np.ndarray, ks: np.ndarray) -> np.ndarray:
        """
        用途：批量计算分数，批内每个样本可处于不同步。默认逐样本调用 evaluate。
        入参说明：
            y_batch (np.ndarray): [N, ...] 对数域状态。
            ks (np.ndarray): [N] 步序号。
        返回值说明：
            np.ndarray: 与 y_batch 同形状的分数估计。
        """
        y_batch = np.asarray(y_batch, dtype=np.float64)
        return np.stack([self.evaluate(y, int(k)) for y, k in zip(y_batch, np.asarray(ks).reshape(-1))])

    def score_tensor(self, y_batch: Tensor, ks: np.ndarray) -> Tensor:
        """
        用途：以张量形式返回批量分数。解析模型没有可训练参数，结果为常量张量；网络模型覆盖此方法以支持反向传播。
        """
        return Tensor(self.score_batch(y_batch.data, ks))
