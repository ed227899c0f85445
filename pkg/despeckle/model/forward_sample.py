from dataclasses import dataclass

import numpy as np


@dataclass
class ForwardSample:
    """
    用途：前向加噪的一次实现。
    入参说明：
        y_k (np.ndarray): 第 k 步的对数域加噪状态，满足 y_k = y_0 − ½η(k) + √η(k)·n_k。
        n_k (np.ndarray): 产生该状态的标准正态样本，训练损失直接使用。
        k (int): 步序号。
        factor (np.ndarray): 乘性噪声实现 ε = exp(−½η(k) + √η(k)·n_k)，元素 > 0。
    """
    y_k: np.ndarray
    n_k: np.ndarray
    k: int
    factor: np.ndarray
