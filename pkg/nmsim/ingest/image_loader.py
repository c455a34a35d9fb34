"""
输入图像编解码模块
支持NMI1平面格式（16字节头）以及二进制PGM(P5)/PPM(P6)
"""

import logging
import re
import struct
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from ..exceptions.custom_exceptions import FormatException, SizeException
from ..models.numeric_models import NumericProfile
from ..models.tensor_models import FeatureMapTensor

logger = logging.getLogger(__name__)

IMAGE_MAGIC = b"NMI1"
IMAGE_HEADER = struct.Struct("<4sIII")

_PNM_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*([^\s#]+)")


def _parse_pnm_header(blob: bytes) -> Tuple[bytes, int, int, int, int]:
    """解析PNM头，返回 (魔数, 宽, 高, 最大值, 数据起始偏移)"""
    tokens = []
    position = 0
    while len(tokens) < 4:
        match = _PNM_TOKEN.match(blob, position)
        if match is None:
            raise FormatException("Truncated PNM header")
        tokens.append(match.group(1))
        position = match.end()
    # 头与数据之间恰好一个空白字节
    position += 1
    try:
        width, height, maxval = (int(token) for token in tokens[1:])
    except ValueError as e:
        raise FormatException(f"Invalid PNM header: {str(e)}", cause=e)
    return tokens[0], width, height, maxval, position


def _decode_pnm(blob: bytes) -> np.ndarray:
    magic, width, height, maxval, offset = _parse_pnm_header(blob)
    if maxval > 255:
        raise FormatException(f"Only 8-bit PNM images are supported, got maxval {maxval}")
    channels = 1 if magic == b"P5" else 3
    expected = offset + channels * width * height
    if len(blob) != expected:
        raise SizeException(f"PNM image has {len(blob)} bytes, expected {expected}",
                            expected=expected, actual=len(blob))
    pixels = np.frombuffer(blob, dtype=np.uint8, offset=offset)
    return pixels.reshape(height, width, channels).transpose(2, 0, 1)


def _decode_nmi(blob: bytes) -> np.ndarray:
    if len(blob) < IMAGE_HEADER.size:
        raise SizeException(f"Image blob has {len(blob)} bytes, shorter than its header",
                            expected=IMAGE_HEADER.size, actual=len(blob))
    _, c, w, h = IMAGE_HEADER.unpack_from(blob, 0)
    expected = IMAGE_HEADER.size + c * w * h
    if len(blob) != expected:
        raise SizeException(f"Image blob has {len(blob)} bytes, expected {expected}",
                            expected=expected, actual=len(blob))
    pixels = np.frombuffer(blob, dtype=np.uint8, offset=IMAGE_HEADER.size)
    return pixels.reshape(c, h, w)


def load_image(source: Union[bytes, str, Path], profile: Optional[NumericProfile] = None) -> FeatureMapTensor:
    """
    加载输入图像并映射到激活值域

    Args:
        source: 图像字节或文件路径
        profile: 数值精度配置，默认int8（像素减128）

    Returns:
        FeatureMapTensor

    Raises:
        FormatException: 未知格式
        SizeException: 数据长度与头不符
    """
    profile = profile or NumericProfile.int8()
    blob = source if isinstance(source, bytes) else Path(source).read_bytes()

    if blob[:4] == IMAGE_MAGIC:
        pixels = _decode_nmi(blob)
    elif blob[:2] in (b"P5", b"P6"):
        pixels = _decode_pnm(blob)
    else:
        raise FormatException(f"Unrecognized image format (leading bytes {blob[:4]!r})")

    tensor = FeatureMapTensor(profile.pixels_to_activations(pixels))
    logger.debug(f"Loaded image with shape (c, w, h) = {tensor.shape}")
    return tensor


def save_image(tensor: FeatureMapTensor, profile: Optional[NumericProfile] = None) -> bytes:
    """将张量写为NMI1字节（load_image的逆操作，超出像素域的值饱和）"""
    profile = profile or NumericProfile.int8()
    pixels = profile.activations_to_pixels(tensor.data)
    return IMAGE_HEADER.pack(IMAGE_MAGIC, tensor.c, tensor.w, tensor.h) + pixels.tobytes()
