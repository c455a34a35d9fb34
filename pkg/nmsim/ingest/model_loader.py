"""
CNN模型描述加载与校验模块
负责将JSON形式的模型描述解析为CnnModel，并检查形状与数值约束
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Union

import orjson
import yaml
from pydantic import ValidationError

from ..exceptions.custom_exceptions import ParseException, ShapeException
from ..models.layer_models import CnnModel, Diagnostic, LayerKind
from ..models.numeric_models import NumericProfile

logger = logging.getLogger(__name__)

# 加载时即拒绝的诊断代码，其余只在validate_model中报告
SHAPE_CODES = ('shape_rule', 'chain_channels', 'chain_size', 'bad_source', 'depthwise_filters')

_KIND_KERNEL = {LayerKind.STD3X3: 3, LayerKind.DW3X3: 3, LayerKind.CONV1X1: 1}

# 层类型与k不符：k属于某种层类型时加载即拒绝，其他k留给SOT编译器按硬件配置表报告
KNOWN_KERNELS = frozenset(_KIND_KERNEL.values())


def _parse_document(config_text: Union[str, bytes]) -> Dict[str, Any]:
    try:
        return orjson.loads(config_text)
    except orjson.JSONDecodeError:
        pass
    try:
        document = yaml.safe_load(config_text)
    except yaml.YAMLError as e:
        raise ParseException(f"Model document is neither valid JSON nor YAML: {str(e)}", cause=e)
    if not isinstance(document, dict):
        raise ParseException("Model document must be a mapping with a 'layers' list")
    return document


def _is_kind_mismatch(model: CnnModel, diagnostic: Diagnostic) -> bool:
    return diagnostic.code == 'kernel_kind' and model.layer(diagnostic.layer_index).k in KNOWN_KERNELS


def load_model(config_text: Union[str, bytes]) -> CnnModel:
    """
    从结构化文本解析CNN模型

    Args:
        config_text: JSON（或YAML）文本，字段名与LayerSpec一致

    Returns:
        CnnModel实例

    Raises:
        ParseException: 文档格式错误或字段不符合schema
        ShapeException: 层形状规则、层类型与k、DW层滤波器数或层间形状链不匹配
    """
    document = _parse_document(config_text)
    if not isinstance(document, dict) or 'layers' not in document:
        raise ParseException("Model document must be a mapping with a 'layers' list")

    try:
        model = CnnModel(**document)
    except ValidationError as e:
        raise ParseException(f"Invalid model document: {str(e)}", cause=e)
    except TypeError as e:
        raise ParseException(f"Invalid model document: {str(e)}", cause=e)

    for diagnostic in shape_diagnostics(model):
        if diagnostic.code in SHAPE_CODES or _is_kind_mismatch(model, diagnostic):
            raise ShapeException(str(diagnostic), layer_index=diagnostic.layer_index)

    logger.info(f"Loaded model '{model.name}' with {len(model)} layers")
    return model


def load_model_file(path: Union[str, Path]) -> CnnModel:
    """从文件加载模型，文件读取失败按解析错误处理"""
    try:
        text = Path(path).read_bytes()
    except OSError as e:
        raise ParseException(f"Cannot read model file {path}: {str(e)}", cause=e)
    return load_model(text)


def dump_model(model: CnnModel) -> bytes:
    """将模型序列化为JSON（load_model的逆操作）"""
    return orjson.dumps(model.model_dump(mode='json', exclude_defaults=True),
                        option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS)


def shape_diagnostics(model: CnnModel) -> List[Diagnostic]:
    """
    检查层形状与层间连接

    Args:
        model: CNN模型

    Returns:
        诊断列表
    """
    diagnostics: List[Diagnostic] = []
    image_c, image_w, image_h = model.input_shape

    for layer in model.layers:
        w_exp, h_exp = layer.expected_out_size()
        if (layer.w_out, layer.h_out) != (w_exp, h_exp):
            diagnostics.append(Diagnostic(
                layer_index=layer.index, code='shape_rule',
                message=f"output {layer.w_out}x{layer.h_out} differs from "
                        f"ceil(input/stride) = {w_exp}x{h_exp}"
            ))

        if _KIND_KERNEL[layer.kind] != layer.k:
            diagnostics.append(Diagnostic(
                layer_index=layer.index, code='kernel_kind',
                message=f"{layer.kind.value} expects k={_KIND_KERNEL[layer.kind]}, got k={layer.k}"
            ))

        if layer.is_depthwise and layer.f_out != 1:
            diagnostics.append(Diagnostic(
                layer_index=layer.index, code='depthwise_filters',
                message=f"depthwise layer must declare f_out=1, got {layer.f_out}"
            ))

        source = layer.source_index
        if source >= layer.index:
            diagnostics.append(Diagnostic(
                layer_index=layer.index, code='bad_source',
                message=f"source layer {source} does not precede layer {layer.index}"
            ))
            continue

        if source == 0:
            src_c, src_w, src_h = image_c, image_w, image_h
        else:
            src_c, src_w, src_h = model.output_shape(source)

        if src_c != layer.c_in:
            diagnostics.append(Diagnostic(
                layer_index=layer.index, code='chain_channels',
                message=f"c_in={layer.c_in} but source {source} produces {src_c} maps"
            ))
        if (src_w, src_h) != (layer.w_in, layer.h_in):
            diagnostics.append(Diagnostic(
                layer_index=layer.index, code='chain_size',
                message=f"input {layer.w_in}x{layer.h_in} but source {source} produces {src_w}x{src_h}"
            ))

    return diagnostics


def numeric_diagnostics(model: CnnModel, profile: NumericProfile) -> List[Diagnostic]:
    """
    检查累加器位宽是否能容纳最坏情况的乘积和

    Args:
        model: CNN模型
        profile: 数值精度配置

    Returns:
        诊断列表
    """
    diagnostics: List[Diagnostic] = []
    _, acc_max = profile.accumulator_range
    max_product = profile.max_product()

    for layer in model.layers:
        bound = layer.fan_in * max_product
        if bound > acc_max:
            diagnostics.append(Diagnostic(
                layer_index=layer.index, code='accumulator_overflow',
                message=f"worst-case sum {bound} of {layer.fan_in} products exceeds "
                        f"{profile.accumulator_bits}-bit accumulator"
            ))
        params = profile.requant_for(layer)
        if profile.requantize and profile.accumulator_bits + params.multiplier.bit_length() > 62:
            diagnostics.append(Diagnostic(
                layer_index=layer.index, code='requant_range',
                message=f"requantization multiplier {params.multiplier} overflows 64-bit arithmetic"
            ))

    return diagnostics


def validate_model(model: CnnModel, profile: NumericProfile) -> List[Diagnostic]:
    """
    校验模型的全部不变量

    Args:
        model: CNN模型
        profile: 数值精度配置

    Returns:
        诊断列表；为空表示模型可在参考实现与模拟器上无溢出运行
    """
    diagnostics = shape_diagnostics(model) + numeric_diagnostics(model, profile)
    for diagnostic in diagnostics:
        logger.debug(f"Model '{model.name}' diagnostic: {diagnostic}")
    return diagnostics
