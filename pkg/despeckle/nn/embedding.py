import numpy as np

from despeckle.common.errors import InvalidArgumentError
from despeckle.common.i18n_utils import t

MAX_PERIOD: float = 10000.0


def time_embedding(k, dim: int) -> np.ndarray:
    """
    用途说明：步序号 k 的正弦嵌入，sin/cos 交错排列，频率在 [1, 1e-4] 上按几何级数分布。
    k=0 时为 [0, 1, 0, 1, ...]，范数恒为 √(dim/2)。
    入参说明：
        k (int | np.ndarray): 步序号或形状 [N] 的步序号数组，≥ 0。
        dim (int): 嵌入维度，正偶数。
    返回值说明：np.ndarray: 形状 [dim]，或批量输入时为 [N, dim]。
    """
    if dim <= 0 or dim % 2:
        raise InvalidArgumentError(t('nn_embedding_odd_dim', dim=dim))
    ks = np.asarray(k, dtype=np.float64)
    if np.any(ks < 0):
        raise InvalidArgumentError(t('nn_embedding_negative_step', k=k))

    half = dim // 2
    exponents = np.arange(half, dtype=np.float64) / max(half - 1, 1)
    frequencies = MAX_PERIOD ** (-exponents)
    angles = ks[..., None] * frequencies
    embedding = np.empty(angles.shape[:-1] + (dim,), dtype=np.float64)
    embedding[..., 0::2] = np.sin(angles)
    embedding[..., 1::2] = np.cos(angles)
    return embedding
