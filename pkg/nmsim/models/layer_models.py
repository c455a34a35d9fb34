"""
卷积层与CNN模型数据模型模块
定义层形状、模型层序列以及模型校验诊断的数据结构
"""

import math
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class LayerKind(str, Enum):
    """卷积层类型"""
    STD3X3 = "Std3x3"
    DW3X3 = "Dw3x3"
    CONV1X1 = "Conv1x1"

    @property
    def code(self) -> int:
        """SOT二进制中的类型编码"""
        return _KIND_CODES[self]

    @property
    def table_label(self) -> str:
        """逐层周期表中的类型标签"""
        return _KIND_LABELS[self]

    @classmethod
    def from_code(cls, code: int) -> 'LayerKind':
        for kind, value in _KIND_CODES.items():
            if value == code:
                return kind
        raise ValueError(f"Unknown layer kind code: {code}")


_KIND_CODES = {LayerKind.STD3X3: 0, LayerKind.DW3X3: 1, LayerKind.CONV1X1: 2}
_KIND_LABELS = {LayerKind.STD3X3: "3x3", LayerKind.DW3X3: "DW3x3", LayerKind.CONV1X1: "1x1"}


class Activation(str, Enum):
    """激活函数"""
    NONE = "None"
    RELU = "ReLU"
    RELU6 = "ReLU6"

    @property
    def code(self) -> int:
        return _ACTIVATION_CODES[self]

    @classmethod
    def from_code(cls, code: int) -> 'Activation':
        for activation, value in _ACTIVATION_CODES.items():
            if value == code:
                return activation
        raise ValueError(f"Unknown activation code: {code}")


_ACTIVATION_CODES = {Activation.NONE: 0, Activation.RELU: 1, Activation.RELU6: 2}


class LayerSpec(BaseModel):
    """单个卷积层的形状描述"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    index: int = Field(..., ge=1, description="层编号L（从1开始）")
    kind: LayerKind = Field(..., description="层类型")
    w_in: int = Field(..., ge=1, description="输入特征图宽度")
    h_in: int = Field(..., ge=1, description="输入特征图高度")
    w_out: int = Field(..., ge=1, description="输出特征图宽度")
    h_out: int = Field(..., ge=1, description="输出特征图高度")
    c_in: int = Field(..., ge=1, description="输入通道数C")
    f_out: int = Field(..., ge=1, description="输出通道数F（DW层为1）")
    k: int = Field(..., ge=1, description="滤波器尺寸")
    stride: int = Field(default=1, description="步长s")
    activation: Activation = Field(default=Activation.NONE, description="激活函数")
    has_bias: bool = Field(default=True, description="是否带偏置")
    source: Optional[int] = Field(default=None, ge=0, description="输入来源层编号，0表示输入图像")
    name: str = Field(default="", description="层名称")

    @field_validator('stride')
    @classmethod
    def validate_stride(cls, v):
        if v not in (1, 2):
            raise ValueError(f"Stride must be 1 or 2, got {v}")
        return v

    @field_validator('k')
    @classmethod
    def validate_k(cls, v):
        if v % 2 == 0:
            raise ValueError(f"Filter size must be odd, got {v}")
        return v

    @property
    def is_depthwise(self) -> bool:
        return self.kind == LayerKind.DW3X3

    @property
    def out_maps(self) -> int:
        """输出特征图数：DW层按输入通道产生，其余按滤波器数"""
        return self.c_in if self.is_depthwise else self.f_out

    @property
    def half(self) -> int:
        return self.k // 2

    @property
    def positions(self) -> int:
        return self.w_out * self.h_out

    @property
    def fan_in(self) -> int:
        """单个输出值的乘积项数"""
        if self.is_depthwise:
            return self.k * self.k
        return self.c_in * self.k * self.k

    @property
    def weight_shape(self) -> Tuple[int, int, int, int]:
        """权重数组形状 [f][c][j][i]"""
        if self.is_depthwise:
            return (self.c_in, 1, self.k, self.k)
        return (self.f_out, self.c_in, self.k, self.k)

    @property
    def source_index(self) -> int:
        return self.index - 1 if self.source is None else self.source

    def expected_out_size(self) -> Tuple[int, int]:
        """same填充下的输出尺寸"""
        return math.ceil(self.w_in / self.stride), math.ceil(self.h_in / self.stride)


class CnnModel(BaseModel):
    """CNN模型：有序的卷积层列表"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    name: str = Field(default="model", description="模型名称")
    layers: List[LayerSpec] = Field(..., min_length=1, description="卷积层列表")

    @model_validator(mode='after')
    def validate_indices(self) -> 'CnnModel':
        for position, layer in enumerate(self.layers, start=1):
            if layer.index != position:
                raise ValueError(f"Layer at position {position} declares index {layer.index}")
        return self

    def __len__(self) -> int:
        return len(self.layers)

    def layer(self, index: int) -> LayerSpec:
        """按层编号获取层"""
        if not 1 <= index <= len(self.layers):
            raise IndexError(f"Model {self.name} has no layer {index}")
        return self.layers[index - 1]

    @property
    def input_shape(self) -> Tuple[int, int, int]:
        """输入图像形状 (c, w, h)"""
        first = self.layers[0]
        return first.c_in, first.w_in, first.h_in

    def output_shape(self, index: int) -> Tuple[int, int, int]:
        """第index层输出形状 (c, w, h)；index为0时返回输入图像形状"""
        if index == 0:
            return self.input_shape
        layer = self.layer(index)
        return layer.out_maps, layer.w_out, layer.h_out

    def last_use(self) -> Dict[int, int]:
        """
        计算每个特征图数据的最后使用层

        Returns:
            {产生层编号(0为图像): 最后读取它的层编号}
        """
        usage: Dict[int, int] = {}
        for layer in self.layers:
            usage[layer.source_index] = layer.index
        return usage


class Diagnostic(BaseModel):
    """模型校验诊断信息"""
    model_config = ConfigDict(frozen=True)

    layer_index: Optional[int] = Field(default=None, description="相关层编号")
    code: str = Field(..., description="诊断代码")
    message: str = Field(..., description="诊断描述")

    def __str__(self) -> str:
        where = f"layer {self.layer_index}" if self.layer_index is not None else "model"
        return f"{where}: [{self.code}] {self.message}"
