"""
卷积参考实现模块
按卷积定义直接计算输出（不使用im2col/FFT/Winograd等快速算法），
同时统计总乘法数与有效乘法数，作为模拟器逐位比对的基准
"""

import logging
from typing import List, Tuple

import numpy as np

from ..exceptions.custom_exceptions import AccumulatorOverflowException, ShapeException
from ..models.layer_models import CnnModel, LayerSpec
from ..models.numeric_models import NumericProfile
from ..models.stats_models import MacCount
from ..models.tensor_models import FeatureMapTensor, WeightStore

logger = logging.getLogger(__name__)


def count_mul_eq2(layer: LayerSpec) -> int:
    """
    层乘法数闭式：F·C·W_out·H_out·k·k（DW层为 C·W_out·H_out·k·k）

    Args:
        layer: 层描述

    Returns:
        乘法数
    """
    per_position = layer.fan_in * layer.out_maps
    return per_position * layer.positions


def _tap_slice(padded: np.ndarray, layer: LayerSpec, j: int, i: int) -> np.ndarray:
    """取滤波器抽头(j, i)对应的全部输出位置的输入值，形状 (..., h_out, w_out)"""
    s = layer.stride
    return padded[..., j:j + s * (layer.h_out - 1) + 1:s, i:i + s * (layer.w_out - 1) + 1:s]


def conv_layer_ref(input_tensor: FeatureMapTensor, layer: LayerSpec, weights: WeightStore,
                   profile: NumericProfile) -> Tuple[FeatureMapTensor, MacCount]:
    """
    单层卷积参考计算

    输出中心为 (s·x, s·y)，抽头偏移 i, j ∈ [−⌊k/2⌋, ⌊k/2⌋]，越界输入视为0。

    Args:
        input_tensor: 输入特征图
        layer: 层描述
        weights: 权重
        profile: 数值精度配置

    Returns:
        (输出特征图, 乘法计数)

    Raises:
        ShapeException: 输入或权重形状不符
        AccumulatorOverflowException: 累加值超出累加器位宽
    """
    if input_tensor.shape != (layer.c_in, layer.w_in, layer.h_in):
        raise ShapeException(
            f"Layer {layer.index} expects input (c, w, h) = {(layer.c_in, layer.w_in, layer.h_in)}, "
            f"got {input_tensor.shape}",
            layer_index=layer.index
        )
    entry = weights.for_layer(layer.index)
    if entry.weights.shape != layer.weight_shape:
        raise ShapeException(f"Layer {layer.index} weights have shape {entry.weights.shape}",
                             layer_index=layer.index)

    h = layer.half
    padded = np.pad(input_tensor.data, ((0, 0), (h, h), (h, h)))
    valid = np.pad(np.ones((layer.h_in, layer.w_in), dtype=np.int64), h)
    w = entry.weights

    acc = np.zeros((layer.out_maps, layer.h_out, layer.w_out), dtype=np.int64)
    valid_taps = 0
    for j in range(layer.k):
        for i in range(layer.k):
            valid_taps += int(_tap_slice(valid, layer, j, i).sum())
            taps = _tap_slice(padded, layer, j, i)
            if layer.is_depthwise:
                acc += w[:, 0, j, i][:, None, None] * taps
            else:
                for c in range(layer.c_in):
                    acc += w[:, c, j, i][:, None, None] * taps[c]

    acc_lo, acc_hi = profile.accumulator_range
    if acc.size and (acc.min() < acc_lo or acc.max() > acc_hi):
        raise AccumulatorOverflowException(
            f"Layer {layer.index} accumulation exceeds {profile.accumulator_bits}-bit accumulator"
        )

    bias = entry.bias if layer.has_bias else np.zeros_like(entry.bias)
    output = profile.finalize(acc, layer, bias[:, None, None])
    per_tap_maps = layer.c_in if layer.is_depthwise else layer.c_in * layer.f_out
    macs = MacCount(total_macs=count_mul_eq2(layer), effective_macs=valid_taps * per_tap_maps)
    return FeatureMapTensor(output), macs


def infer_ref(model: CnnModel, weights: WeightStore, image: FeatureMapTensor,
              profile: NumericProfile) -> Tuple[List[FeatureMapTensor], MacCount]:
    """
    逐层执行参考推理

    Args:
        model: CNN模型
        weights: 权重
        image: 输入图像
        profile: 数值精度配置

    Returns:
        (每层输出列表, 累计乘法计数)
    """
    outputs: List[FeatureMapTensor] = []
    total = MacCount()
    for layer in model.layers:
        source = layer.source_index
        input_tensor = image if source == 0 else outputs[source - 1]
        output, macs = conv_layer_ref(input_tensor, layer, weights, profile)
        outputs.append(output)
        total = total + macs
        logger.debug(f"Reference layer {layer.index}: {macs.total_macs} MACs ({macs.effective_macs} effective)")
    logger.info(f"Reference inference of '{model.name}' finished: {total.total_macs} MACs")
    return outputs, total
