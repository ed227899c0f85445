import os
from typing import Any, Dict, Iterator, List, Optional

import numpy as np

from despeckle.common.errors import ConfigError, DespeckleError
from despeckle.common.i18n_utils import t
from despeckle.common.log_utils import LogUtils
from despeckle.common.utils import Utils
from despeckle.forward.random_source import RandomSource, StreamId
from despeckle.imgio.intensity_mapping import to_intensity
from despeckle.imgio.pnm_codec import read_pnm
from despeckle.model.image_tensor import ImageTensor


class PatchStream:
    """
    用途：确定性的随机裁块流。所有图像的所有合法裁块起点组成一个池，
    每一轮按种子对整个池做一次随机排列后依次取出，因此一轮恰好覆盖每个起点一次。
    入参说明：
        images (List[np.ndarray]): [C, H, W] 强度图，通道数一致。
        patch (int): 裁块边长。
        seed (int): 种子。
    """

    def __init__(self, images: List[np.ndarray], patch: int, seed: int) -> None:
        self.images: List[np.ndarray] = images
        self.patch: int = int(patch)
        self.rng: RandomSource = RandomSource(seed, StreamId.TRAIN_DATA)
        origins = []
        for index, image in enumerate(images):
            rows, cols = image.shape[1] - self.patch + 1, image.shape[2] - self.patch + 1
            r, c = np.meshgrid(np.arange(rows), np.arange(cols), indexing="ij")
            origins.append(np.stack([np.full(r.size, index), r.ravel(), c.ravel()], axis=1))
        self.origins: np.ndarray = np.concatenate(origins, axis=0)
        self._order: np.ndarray = np.empty(0, dtype=np.int64)
        self._position: int = 0

    @property
    def items_per_epoch(self) -> int:
        return int(self.origins.shape[0])

    @property
    def channels(self) -> int:
        return int(self.images[0].shape[0])

    def _next_origin(self) -> np.ndarray:
        if self._position >= self._order.size:
            self._order = self.rng.permutation(self.items_per_epoch)
            self._position = 0
        origin = self.origins[self._order[self._position]]
        self._position += 1
        return origin

    def next_patch(self) -> ImageTensor:
        index, row, col = (int(v) for v in self._next_origin())
        crop = self.images[index][:, row:row + self.patch, col:col + self.patch]
        return ImageTensor(np.ascontiguousarray(crop))

    def next_batch(self, batch_size: int) -> np.ndarray:
        """用途说明：[B, C, P, P] 强度裁块。"""
        return np.stack([self.next_patch().data for _ in range(int(batch_size))])

    def next_log_batch(self, batch_size: int) -> np.ndarray:
        return np.log(self.next_batch(batch_size))

    def __iter__(self) -> Iterator[ImageTensor]:
        while True:
            yield self.next_patch()

    def rng_state(self) -> Dict[str, Any]:
        return self.rng.get_state()


def load_images(directory: str, min_size: int = 1, channels: Optional[int] = None) -> Dict[str, np.ndarray]:
    """
    用途说明：按文件名字典序读取目录中的 PNM 图像并映射为强度。无法读取、尺寸不足或通道数不一致的文件跳过并记录日志。
    入参说明：
        directory (str): 目录。
        min_size (int): 最小边长。
        channels (int, optional): 期望通道数，默认取第一张可读图像的通道数。
    返回值说明：Dict[str, np.ndarray]: 文件名 -> [C, H, W] 强度图。
    """
    files = Utils.list_pnm_files(directory)
    if not files:
        raise ConfigError(t('dataset_empty_dir', path=directory))

    images: Dict[str, np.ndarray] = {}
    for path in files:
        try:
            image = to_intensity(read_pnm(path)).data
        except (DespeckleError, OSError) as e:
            LogUtils.info(t('dataset_skip_unreadable', path=path, error=str(e)))
            continue
        if min(image.shape[1:]) < min_size:
            LogUtils.info(t('dataset_skip_small', path=path, size=min_size))
            continue
        if channels is None:
            channels = image.shape[0]
        if image.shape[0] != channels:
            LogUtils.info(t('dataset_skip_channels', path=path, channels=image.shape[0], expected=channels))
            continue
        images[os.path.basename(path)] = image

    if not images:
        raise ConfigError(t('dataset_all_skipped', path=directory))
    return images


def load_dataset(directory: str, patch: int, seed: int) -> PatchStream:
    """
    用途说明：构造训练用裁块流。
    入参说明：
        directory (str): 至少含一张可读 PNM 图像的目录。
        patch (int): 裁块边长。
        seed (int): 种子，相同种子得到相同的裁块顺序。
    返回值说明：PatchStream
    """
    images = load_images(directory, min_size=patch)
    LogUtils.info(t('dataset_loaded', count=len(images), path=directory, patch=patch))
    return PatchStream(list(images.values()), patch, seed)
