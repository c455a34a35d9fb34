"""
权重二进制编解码模块

格式：魔数 "NMW1" + 版本字节 + 总字节数(uint32 LE)，随后按模型层顺序
依次存放权重 [f][c][j][i] 与偏置 [f]，全部为小端补码整数。
"""

import logging
import struct
from typing import Dict, Optional

import numpy as np

from ..exceptions.custom_exceptions import FormatException, ShapeException, SizeException
from ..models.layer_models import CnnModel
from ..models.numeric_models import NumericProfile
from ..models.tensor_models import LayerWeights, WeightStore

logger = logging.getLogger(__name__)

WEIGHTS_MAGIC = b"NMW1"
WEIGHTS_VERSION = 1
HEADER = struct.Struct("<4sBI")


def _word_dtype(bits: int) -> np.dtype:
    return np.dtype(f"<i{bits // 8}")


def expected_size(model: CnnModel, profile: NumericProfile) -> int:
    """模型与数值配置所确定的权重文件字节数"""
    size = HEADER.size
    for layer in model.layers:
        size += int(np.prod(layer.weight_shape)) * profile.weight_bytes
        size += layer.out_maps * profile.bias_bytes
    return size


def load_weights(blob: bytes, model: CnnModel, profile: Optional[NumericProfile] = None) -> WeightStore:
    """
    解析权重二进制数据

    Args:
        blob: 权重文件内容
        model: CNN模型
        profile: 数值精度配置，默认int8

    Returns:
        WeightStore实例

    Raises:
        FormatException: 魔数或版本错误
        SizeException: 长度与模型不符
    """
    profile = profile or NumericProfile.int8()
    expected = expected_size(model, profile)

    if len(blob) < HEADER.size:
        raise SizeException(f"Weights blob has {len(blob)} bytes, expected {expected}",
                            expected=expected, actual=len(blob))

    magic, version, declared = HEADER.unpack_from(blob, 0)
    if magic != WEIGHTS_MAGIC:
        raise FormatException(f"Bad weights magic {magic!r}, expected {WEIGHTS_MAGIC!r}")
    if version != WEIGHTS_VERSION:
        raise FormatException(f"Unsupported weights version {version}")
    if len(blob) != expected or declared != expected:
        raise SizeException(
            f"Weights blob has {len(blob)} bytes (header declares {declared}), expected {expected}",
            expected=expected, actual=len(blob)
        )

    weight_dtype = _word_dtype(profile.weight_bits)
    bias_dtype = _word_dtype(profile.accumulator_bits)
    offset = HEADER.size
    layers: Dict[int, LayerWeights] = {}
    for layer in model.layers:
        count = int(np.prod(layer.weight_shape))
        weights = np.frombuffer(blob, dtype=weight_dtype, count=count, offset=offset)
        offset += count * weight_dtype.itemsize
        bias = np.frombuffer(blob, dtype=bias_dtype, count=layer.out_maps, offset=offset)
        offset += layer.out_maps * bias_dtype.itemsize
        layers[layer.index] = LayerWeights(weights=weights.reshape(layer.weight_shape), bias=bias)

    logger.info(f"Loaded {expected} bytes of weights for model '{model.name}'")
    return WeightStore(layers=layers)


def save_weights(store: WeightStore, model: CnnModel, profile: Optional[NumericProfile] = None) -> bytes:
    """
    序列化权重（load_weights的逆操作）

    Raises:
        ShapeException: 权重形状与模型不符
        SizeException: 数值超出位宽
    """
    profile = profile or NumericProfile.int8()
    store.check_against(model)

    w_lo, w_hi = profile.weight_range
    b_lo, b_hi = profile.accumulator_range
    weight_dtype = _word_dtype(profile.weight_bits)
    bias_dtype = _word_dtype(profile.accumulator_bits)

    chunks = [HEADER.pack(WEIGHTS_MAGIC, WEIGHTS_VERSION, expected_size(model, profile))]
    for layer in model.layers:
        entry = store.for_layer(layer.index)
        if entry.bias.shape != (layer.out_maps,):
            raise ShapeException(f"Layer {layer.index} bias has shape {entry.bias.shape}",
                                 layer_index=layer.index)
        if entry.weights.min(initial=0) < w_lo or entry.weights.max(initial=0) > w_hi:
            raise SizeException(f"Layer {layer.index} weights exceed {profile.weight_bits}-bit range")
        if entry.bias.min(initial=0) < b_lo or entry.bias.max(initial=0) > b_hi:
            raise SizeException(f"Layer {layer.index} biases exceed {profile.accumulator_bits}-bit range")
        chunks.append(entry.weights.astype(weight_dtype).tobytes())
        chunks.append(entry.bias.astype(bias_dtype).tobytes())
    return b"".join(chunks)
