"""
去噪分数匹配损失：mean((n_k + √η(k)·s_θ(y_k, k))²)。
"""
from typing import Optional

import numpy as np

from despeckle.common.errors import InvalidArgumentError, ShapeError
from despeckle.common.i18n_utils import t
from despeckle.forward.forward_process import ITO_DRIFT
from despeckle.forward.random_source import RandomSource
from despeckle.nn import ops
from despeckle.nn.tensor import Tensor
from despeckle.schedule.noise_schedule import NoiseSchedule
from despeckle.score.base_score_model import ScoreModel


def loss_batch(model: ScoreModel, y0_batch: np.ndarray, k_batch: np.ndarray, s: NoiseSchedule,
               rng: RandomSource, noise: Optional[np.ndarray] = None) -> Tensor:
    """
    用途说明：对批内每个样本抽取 n_k，按 y_k = y0 − ½η(k) + √η(k)·n_k 加噪，
    返回批与元素上的均方残差。对网络模型可微。
    入参说明：
        model (ScoreModel): 分数模型。
        y0_batch (np.ndarray): [N, ...] 干净对数图像。
        k_batch (np.ndarray): [N] 步序号，取值 1..K。
        s (NoiseSchedule): 日程。
        rng (RandomSource): 噪声随机源。
        noise (np.ndarray, optional): 注入的 n_k，形状同 y0_batch。
    返回值说明：Tensor: 标量损失，≥ 0。
    """
    y0_batch = np.asarray(y0_batch, dtype=np.float64)
    ks = np.asarray(k_batch, dtype=np.int64).reshape(-1)
    if y0_batch.ndim < 1 or ks.size != y0_batch.shape[0]:
        raise ShapeError(t('nn_step_batch_mismatch', steps=ks.size, batch=y0_batch.shape[0] if y0_batch.ndim else 0))
    if np.any(ks == 0):
        raise InvalidArgumentError(t('train_zero_step_in_batch'))
    for k in ks:
        s.check_step(int(k), lower=1)

    if noise is None:
        n = rng.normal(y0_batch.shape)
    else:
        n = np.asarray(noise, dtype=np.float64)
        if n.shape != y0_batch.shape:
            raise ShapeError(t('forward_noise_shape', expected=y0_batch.shape, actual=n.shape))

    per_sample = (-1,) + (1,) * (y0_batch.ndim - 1)
    eta_k = s.eta[ks].reshape(per_sample)
    root_eta = np.sqrt(eta_k)
    y_k = y0_batch + ITO_DRIFT * eta_k + root_eta * n

    score = model.score_tensor(Tensor(y_k), ks)
    residual = ops.add(Tensor(n), ops.mul(score, root_eta))
    return ops.mean(ops.square(residual))
