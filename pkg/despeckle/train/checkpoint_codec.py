"""
检查点二进制格式（小端）：

    magic "GBMD" | u32 版本 | u32 头部字段数
    重复 { u32 键长 | 键 (utf-8) | u32 值长 | 值 (utf-8) }
    u64 参数块长度 | 参数块（按 param_layout 顺序拼接的 <f4）
    u64 优化器块长度 | 优化器块（全部 m 后接全部 v，<f8）

头部字段的文本编码是确定性的（浮点用 float.hex，JSON 排序键），因此 save → load → save 逐字节一致。
"""
import json
import os
import struct
from typing import Any, Dict, List, Tuple

import numpy as np

from config import GlobalConfig
from despeckle.common.errors import ConfigError, CorruptCheckpointError, UnsupportedVersionError
from despeckle.common.i18n_utils import t
from despeckle.common.log_utils import LogUtils
from despeckle.model.checkpoint import Checkpoint, CheckpointHeader
from despeckle.nn.optimizer import AdamState
from despeckle.nn.score_net import ScoreNetConfig
from despeckle.schedule.noise_schedule import NoiseSchedule


def _json(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


def _encode_header(c: Checkpoint) -> List[Tuple[str, str]]:
    return [
        ("train_config", _json(c.train_config)),
        ("schedule.steps", str(c.schedule.steps)),
        ("schedule.eta_per_step", float(c.schedule.eta_per_step).hex()),
        ("schedule.eta", ",".join(float(v).hex() for v in c.schedule.eta)),
        ("arch", _json(c.arch.to_dict())),
        ("param_layout", _json([[name, list(shape)] for name, shape in c.layout])),
        ("epoch", str(int(c.epoch))),
        ("optimizer.step", str(int(c.optimizer.step))),
        ("rng_state", _json(c.rng_state)),
    ]


def encode_checkpoint(c: Checkpoint) -> bytes:
    """
    用途说明：把检查点编码为字节串。
    """
    parts: List[bytes] = [GlobalConfig.CHECKPOINT_MAGIC, struct.pack("<I", int(c.version))]
    header = _encode_header(c)
    parts.append(struct.pack("<I", len(header)))
    for key, value in header:
        key_bytes, value_bytes = key.encode("utf-8"), value.encode("utf-8")
        parts.append(struct.pack("<I", len(key_bytes)) + key_bytes)
        parts.append(struct.pack("<I", len(value_bytes)) + value_bytes)

    params_blob = b"".join(np.asarray(p, dtype="<f4").tobytes() for p in c.parameters)
    parts.append(struct.pack("<Q", len(params_blob)) + params_blob)
    moments = list(c.optimizer.m) + list(c.optimizer.v)
    optimizer_blob = b"".join(np.asarray(a, dtype="<f8").tobytes() for a in moments)
    parts.append(struct.pack("<Q", len(optimizer_blob)) + optimizer_blob)
    return b"".join(parts)


def save_checkpoint(c: Checkpoint, path: str) -> None:
    """
    用途说明：写入检查点。先写临时文件再替换，避免中断留下半个文件。
    入参说明：
        c (Checkpoint): 检查点。
        path (str): 目标路径。
    返回值说明：无
    """
    data = encode_checkpoint(c)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    tmp_path = f"{path}.tmp"
    with open(tmp_path, "wb") as f:
        f.write(data)
    os.replace(tmp_path, path)
    LogUtils.info(t('checkpoint_saved', path=path, epoch=c.epoch, size=len(data)))


class _ByteReader:
    """
    用途：带偏移追踪的顺序读取器，数据不足时抛出带偏移的 corrupt-checkpoint 错误。
    """

    def __init__(self, data: bytes) -> None:
        self.data: bytes = data
        self.offset: int = 0

    def take(self, size: int, what: str) -> bytes:
        if size < 0 or self.offset + size > len(self.data):
            raise CorruptCheckpointError(t('checkpoint_truncated', what=what, offset=self.offset), self.offset)
        chunk = self.data[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def u32(self, what: str) -> int:
        return struct.unpack("<I", self.take(4, what))[0]

    def u64(self, what: str) -> int:
        return struct.unpack("<Q", self.take(8, what))[0]


class _StreamReader(_ByteReader):
    """
    用途：按需从文件读取的 _ByteReader，只消费头部所需的字节。
    """

    def __init__(self, handle) -> None:
        super().__init__(b"")
        self.handle = handle

    def take(self, size: int, what: str) -> bytes:
        missing = self.offset + size - len(self.data)
        if size >= 0 and missing > 0:
            self.data += self.handle.read(missing)
        return super().take(size, what)


def _read_header(reader: _ByteReader) -> Tuple[int, Dict[str, str]]:
    magic = reader.take(len(GlobalConfig.CHECKPOINT_MAGIC), "magic")
    if magic != GlobalConfig.CHECKPOINT_MAGIC:
        raise CorruptCheckpointError(t('checkpoint_bad_magic', offset=0), 0)
    version = reader.u32("version")
    if version != GlobalConfig.CHECKPOINT_VERSION:
        raise UnsupportedVersionError(t('checkpoint_unsupported_version', version=version,
                                        supported=GlobalConfig.CHECKPOINT_VERSION))
    count = reader.u32("header count")
    fields: Dict[str, str] = {}
    for _ in range(count):
        key = reader.take(reader.u32("key length"), "key").decode("utf-8", errors="replace")
        start = reader.offset
        try:
            fields[key] = reader.take(reader.u32("value length"), key).decode("utf-8")
        except UnicodeDecodeError:
            raise CorruptCheckpointError(t('checkpoint_bad_field', field=key, offset=start), start) from None
    return version, fields


def _field(fields: Dict[str, str], key: str, offset: int) -> str:
    if key not in fields:
        raise CorruptCheckpointError(t('checkpoint_missing_field', field=key, offset=offset), offset)
    return fields[key]


def _parse_header(fields: Dict[str, str], offset: int) -> Dict[str, Any]:
    try:
        eta = np.array([float.fromhex(v) for v in _field(fields, "schedule.eta", offset).split(",")])
        parsed = {
            "train_config": json.loads(_field(fields, "train_config", offset)),
            "steps": int(_field(fields, "schedule.steps", offset)),
            "eta_per_step": float.fromhex(_field(fields, "schedule.eta_per_step", offset)),
            "eta": eta,
            "arch": ScoreNetConfig.from_dict(json.loads(_field(fields, "arch", offset))),
            "layout": [(str(name), tuple(int(d) for d in shape))
                       for name, shape in json.loads(_field(fields, "param_layout", offset))],
            "epoch": int(_field(fields, "epoch", offset)),
            "optimizer_step": int(_field(fields, "optimizer.step", offset)),
            "rng_state": json.loads(_field(fields, "rng_state", offset)),
        }
    except CorruptCheckpointError:
        raise
    except (ValueError, KeyError, TypeError) as e:
        raise CorruptCheckpointError(t('checkpoint_bad_header', error=str(e), offset=offset), offset) from None
    if parsed["steps"] + 1 != eta.size:
        raise CorruptCheckpointError(t('checkpoint_bad_header', error="schedule length", offset=offset), offset)
    return parsed


def decode_checkpoint(data: bytes) -> Checkpoint:
    """
    用途说明：从字节串解码检查点。
    返回值说明：Checkpoint
    """
    reader = _ByteReader(data)
    version, fields = _read_header(reader)
    header = _parse_header(fields, reader.offset)

    sizes = [int(np.prod(shape, dtype=np.int64)) for _, shape in header["layout"]]
    total = int(sum(sizes))
    blob_offset = reader.offset
    params_blob = reader.take(reader.u64("parameter length"), "parameters")
    if len(params_blob) != total * 4:
        raise CorruptCheckpointError(t('checkpoint_blob_size', what="parameters", expected=total * 4,
                                       actual=len(params_blob), offset=blob_offset), blob_offset)
    blob_offset = reader.offset
    optimizer_blob = reader.take(reader.u64("optimizer length"), "optimizer")
    if len(optimizer_blob) != total * 16:
        raise CorruptCheckpointError(t('checkpoint_blob_size', what="optimizer", expected=total * 16,
                                       actual=len(optimizer_blob), offset=blob_offset), blob_offset)
    if reader.offset != len(data):
        raise CorruptCheckpointError(t('checkpoint_trailing_bytes', offset=reader.offset), reader.offset)

    flat_params = np.frombuffer(params_blob, dtype="<f4").astype(np.float32)
    flat_moments = np.frombuffer(optimizer_blob, dtype="<f8").astype(np.float64)
    parameters: List[np.ndarray] = []
    m_list: List[np.ndarray] = []
    v_list: List[np.ndarray] = []
    start = 0
    for (_, shape), size in zip(header["layout"], sizes):
        parameters.append(flat_params[start:start + size].reshape(shape).copy())
        m_list.append(flat_moments[start:start + size].reshape(shape).copy())
        v_list.append(flat_moments[total + start:total + start + size].reshape(shape).copy())
        start += size

    try:
        schedule = NoiseSchedule(eta=header["eta"], eta_per_step=header["eta_per_step"])
    except ValueError as e:
        raise CorruptCheckpointError(t('checkpoint_bad_header', error=str(e), offset=0), 0) from None

    return Checkpoint(version=version, train_config=header["train_config"], schedule=schedule,
                      arch=header["arch"], layout=header["layout"], parameters=parameters,
                      optimizer=AdamState(step=header["optimizer_step"], m=m_list, v=v_list),
                      epoch=header["epoch"], rng_state=header["rng_state"])


def _check_exists(path: str) -> None:
    if not os.path.isfile(path):
        raise ConfigError(t('checkpoint_not_found', path=path))


def load_checkpoint(path: str) -> Checkpoint:
    """
    用途说明：读取检查点文件。
    入参说明：path (str): 文件路径。
    返回值说明：Checkpoint
    """
    _check_exists(path)
    with open(path, "rb") as f:
        data = f.read()
    checkpoint = decode_checkpoint(data)
    LogUtils.debug(t('checkpoint_loaded', path=path, epoch=checkpoint.epoch, params=checkpoint.parameter_count))
    return checkpoint


def inspect_checkpoint(path: str) -> CheckpointHeader:
    """
    用途说明：只读取头部，返回 (K, eta_per_step, epoch, 网络结构, 参数数量) 等摘要，不读取参数块。
    """
    _check_exists(path)
    with open(path, "rb") as f:
        # 头部长度未知，按字段逐段追加读取
        stream = _StreamReader(f)
        version, fields = _read_header(stream)
    header = _parse_header(fields, stream.offset)
    count = int(sum(int(np.prod(shape, dtype=np.int64)) for _, shape in header["layout"]))
    return CheckpointHeader(version=version, steps=header["steps"], eta_per_step=header["eta_per_step"],
                            epoch=header["epoch"], arch=header["arch"], parameter_count=count,
                            optimizer_step=header["optimizer_step"])

