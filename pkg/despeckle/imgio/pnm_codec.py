"""
二进制 PGM (P5) / PPM (P6) 读写，仅支持 maxval 255。
"""
import os
from typing import Tuple

import numpy as np

from despeckle.common.errors import ParseError, UnsupportedFormatError
from despeckle.common.i18n_utils import t
from despeckle.model.raw_image import RawImage

_WHITESPACE = b" \t\n\r\x0b\x0c"
_MAGIC_CHANNELS = {b"P5": 1, b"P6": 3}


def _skip_whitespace(data: bytes, offset: int) -> int:
    while offset < len(data):
        byte = data[offset:offset + 1]
        if byte == b"#":
            # 注释延续到行尾
            while offset < len(data) and data[offset:offset + 1] not in (b"\n", b"\r"):
                offset += 1
        elif byte in _WHITESPACE:
            offset += 1
        else:
            break
    return offset


def _read_int(data: bytes, offset: int, what: str) -> Tuple[int, int]:
    offset = _skip_whitespace(data, offset)
    start = offset
    while offset < len(data) and data[offset:offset + 1].isdigit():
        offset += 1
    if offset == start:
        raise ParseError(t('pnm_expected_number', what=what, offset=start), start)
    return int(data[start:offset]), offset


def decode_pnm(data: bytes) -> RawImage:
    """
    用途说明：解析 P5/P6 字节串。
    返回值说明：RawImage
    """
    magic = data[:2]
    if magic not in _MAGIC_CHANNELS:
        raise ParseError(t('pnm_bad_magic', magic=magic), 0)
    channels = _MAGIC_CHANNELS[magic]

    width, offset = _read_int(data, 2, "width")
    height, offset = _read_int(data, offset, "height")
    maxval_offset = _skip_whitespace(data, offset)
    maxval, offset = _read_int(data, offset, "maxval")
    if width < 1 or height < 1:
        raise ParseError(t('pnm_bad_dims', width=width, height=height, offset=maxval_offset), maxval_offset)
    if not 0 < maxval < 65536:
        raise ParseError(t('pnm_bad_maxval', maxval=maxval, offset=maxval_offset), maxval_offset)
    if maxval != 255:
        raise UnsupportedFormatError(t('pnm_unsupported_maxval', maxval=maxval))

    if offset >= len(data) or data[offset:offset + 1] not in _WHITESPACE:
        raise ParseError(t('pnm_missing_separator', offset=offset), offset)
    offset += 1

    expected = width * height * channels
    payload = data[offset:offset + expected]
    if len(payload) < expected:
        raise ParseError(t('pnm_truncated', expected=expected, actual=len(payload), offset=offset + len(payload)),
                         offset + len(payload))
    samples = np.frombuffer(payload, dtype=np.uint8).copy()
    return RawImage(width=width, height=height, channels=channels, samples=samples)


def encode_pnm(img: RawImage) -> bytes:
    magic = b"P5" if img.channels == 1 else b"P6"
    header = magic + f"\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(img.samples, dtype=np.uint8).tobytes()


def read_pnm(path: str) -> RawImage:
    """
    用途说明：读取 PGM/PPM 文件。
    入参说明：path (str): 文件路径。
    返回值说明：RawImage
    """
    with open(path, "rb") as f:
        return decode_pnm(f.read())


def write_pnm(img: RawImage, path: str) -> None:
    """
    用途说明：写出 PGM（单通道）或 PPM（三通道）文件。
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, "wb") as f:
        f.write(encode_pnm(img))
