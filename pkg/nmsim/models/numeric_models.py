"""
数值精度模型模块
定义激活值/权重/累加器位宽以及每层重量化参数，
并提供参考实现与SU共用的后累加计算路径
"""

from typing import Dict, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .layer_models import Activation, LayerSpec

ArrayOrInt = Union[np.ndarray, int]


class RequantParams(BaseModel):
    """每层重量化参数：乘法 + 算术右移"""
    model_config = ConfigDict(frozen=True)

    multiplier: int = Field(default=1, ge=1)
    shift: int = Field(default=0, ge=0, le=62)
    relu6_ceiling: Optional[int] = Field(default=None, ge=0, description="累加域中的ReLU6上限")


class NumericProfile(BaseModel):
    """数值精度配置"""
    model_config = ConfigDict(frozen=True)

    name: str = Field(default="int8")
    activation_bits: int = Field(default=8)
    activation_signed: bool = Field(default=True)
    weight_bits: int = Field(default=8)
    accumulator_bits: int = Field(default=32)
    requantize: bool = Field(default=True)
    layers: Dict[int, RequantParams] = Field(default_factory=dict)

    @field_validator('activation_bits', 'weight_bits', 'accumulator_bits')
    @classmethod
    def validate_bits(cls, v):
        if v not in (8, 16, 32, 64):
            raise ValueError(f"Bit width must be one of 8, 16, 32, 64, got {v}")
        return v

    @classmethod
    def int8(cls) -> 'NumericProfile':
        """默认配置：8位对称量化，32位累加"""
        return cls()

    @classmethod
    def wide(cls) -> 'NumericProfile':
        """宽位配置：32位激活值，64位累加，无重量化"""
        return cls(
            name="wide",
            activation_bits=32,
            activation_signed=True,
            weight_bits=8,
            accumulator_bits=64,
            requantize=False
        )

    @property
    def activation_range(self) -> Tuple[int, int]:
        if self.activation_signed:
            return -(1 << (self.activation_bits - 1)), (1 << (self.activation_bits - 1)) - 1
        return 0, (1 << self.activation_bits) - 1

    @property
    def weight_range(self) -> Tuple[int, int]:
        return -(1 << (self.weight_bits - 1)), (1 << (self.weight_bits - 1)) - 1

    @property
    def accumulator_range(self) -> Tuple[int, int]:
        return -(1 << (self.accumulator_bits - 1)), (1 << (self.accumulator_bits - 1)) - 1

    @property
    def weight_bytes(self) -> int:
        return self.weight_bits // 8

    @property
    def bias_bytes(self) -> int:
        return self.accumulator_bits // 8

    def max_product(self) -> int:
        """单个乘积的最大绝对值"""
        lo, hi = self.activation_range
        w_lo, _ = self.weight_range
        return max(abs(lo), hi) * abs(w_lo)

    def requant_for(self, layer: LayerSpec) -> RequantParams:
        """
        获取层的重量化参数，未显式配置的层使用推导的默认值

        Args:
            layer: 层描述

        Returns:
            重量化参数
        """
        explicit = self.layers.get(layer.index)
        if explicit is not None:
            if explicit.relu6_ceiling is None:
                return explicit.model_copy(update={'relu6_ceiling': self._default_ceiling(explicit)})
            return explicit
        if not self.requantize:
            return RequantParams(multiplier=1, shift=0, relu6_ceiling=6)
        shift = (self.weight_bits - 1) + ((layer.fan_in - 1).bit_length() + 1) // 2
        params = RequantParams(multiplier=1, shift=min(shift, 62))
        return params.model_copy(update={'relu6_ceiling': self._default_ceiling(params)})

    def _default_ceiling(self, params: RequantParams) -> int:
        if not self.requantize:
            return 6
        # ReLU6饱和点对应激活值满量程
        _, hi = self.activation_range
        return (hi << params.shift) // params.multiplier

    def finalize(self, netsum: ArrayOrInt, layer: LayerSpec, bias: ArrayOrInt) -> np.ndarray:
        """
        后累加计算：偏置、激活函数、重量化与饱和

        参考实现与SU共用此函数，以保证两者逐位一致。

        Args:
            netsum: 最终累加值
            layer: 层描述
            bias: 偏置值（可与netsum广播）

        Returns:
            激活值数组(int64)
        """
        params = self.requant_for(layer)
        value = np.asarray(netsum, dtype=np.int64) + np.asarray(bias, dtype=np.int64)

        if layer.activation == Activation.RELU:
            value = np.maximum(value, 0)
        elif layer.activation == Activation.RELU6:
            value = np.clip(value, 0, params.relu6_ceiling)

        if self.requantize:
            value = value * params.multiplier
            if params.shift > 0:
                value = (value + (1 << (params.shift - 1))) >> params.shift

        lo, hi = self.activation_range
        return np.clip(value, lo, hi).astype(np.int64)

    def pixels_to_activations(self, pixels: np.ndarray) -> np.ndarray:
        """将8位像素映射到激活值域：有符号8位配置减去128"""
        values = np.asarray(pixels, dtype=np.int64)
        if self.activation_signed and self.activation_bits == 8:
            return values - 128
        return values

    def activations_to_pixels(self, values: np.ndarray) -> np.ndarray:
        """pixels_to_activations的逆映射"""
        values = np.asarray(values, dtype=np.int64)
        if self.activation_signed and self.activation_bits == 8:
            values = values + 128
        return np.clip(values, 0, 255).astype(np.uint8)
