"""
特征图与权重张量模块
张量在构造后只读，可在并发模拟之间共享
"""

from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from ..exceptions.custom_exceptions import ShapeException
from .layer_models import CnnModel
from .numeric_models import NumericProfile


def _frozen_int64(values) -> np.ndarray:
    array = np.array(values, dtype=np.int64, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class FeatureMapTensor:
    """
    C个W×H特征图，data按 [c][y][x] 存放

    越界坐标只能通过receptor的掩码得到0，本类型直接访问越界时抛出IndexError。
    """
    data: np.ndarray

    def __post_init__(self):
        array = _frozen_int64(self.data)
        if array.ndim != 3:
            raise ShapeException(f"Feature map tensor must be 3-D (c, h, w), got shape {array.shape}")
        object.__setattr__(self, 'data', array)

    @classmethod
    def zeros(cls, c: int, w: int, h: int) -> 'FeatureMapTensor':
        return cls(np.zeros((c, h, w), dtype=np.int64))

    @property
    def c(self) -> int:
        return int(self.data.shape[0])

    @property
    def h(self) -> int:
        return int(self.data.shape[1])

    @property
    def w(self) -> int:
        return int(self.data.shape[2])

    @property
    def shape(self) -> Tuple[int, int, int]:
        """(c, w, h)"""
        return self.c, self.w, self.h

    def at(self, c: int, x: int, y: int) -> int:
        if not (0 <= c < self.c and 0 <= x < self.w and 0 <= y < self.h):
            raise IndexError(f"Index (c={c}, x={x}, y={y}) outside tensor of shape {self.shape}")
        return int(self.data[c, y, x])

    def plane(self, c: int) -> np.ndarray:
        return self.data[c]

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeatureMapTensor):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(np.array_equal(self.data, other.data))

    def __hash__(self) -> int:
        return hash((self.data.shape, self.data.tobytes()))


@dataclass(frozen=True)
class LayerWeights:
    """单层权重 w[f][c][j][i] 与偏置 b[f]"""
    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        weights = _frozen_int64(self.weights)
        bias = _frozen_int64(self.bias)
        if weights.ndim != 4:
            raise ShapeException(f"Weights must be 4-D [f][c][j][i], got shape {weights.shape}")
        if bias.shape != (weights.shape[0],):
            raise ShapeException(f"Bias shape {bias.shape} does not match {weights.shape[0]} filters")
        object.__setattr__(self, 'weights', weights)
        object.__setattr__(self, 'bias', bias)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LayerWeights):
            return NotImplemented
        return (self.weights.shape == other.weights.shape
                and bool(np.array_equal(self.weights, other.weights))
                and bool(np.array_equal(self.bias, other.bias)))

    def __hash__(self) -> int:
        return hash((self.weights.tobytes(), self.bias.tobytes()))


@dataclass(frozen=True)
class WeightStore:
    """模型全部层的权重，按层编号索引"""
    layers: Dict[int, LayerWeights] = field(default_factory=dict)

    def for_layer(self, index: int) -> LayerWeights:
        weights = self.layers.get(index)
        if weights is None:
            raise ShapeException(f"No weights for layer {index}", layer_index=index)
        return weights

    def check_against(self, model: CnnModel) -> None:
        """
        校验权重形状与模型一致

        Raises:
            ShapeException: 缺少层或形状不符
        """
        for layer in model.layers:
            weights = self.for_layer(layer.index)
            if weights.weights.shape != layer.weight_shape:
                raise ShapeException(
                    f"Layer {layer.index} weights have shape {weights.weights.shape}, "
                    f"expected {layer.weight_shape}",
                    layer_index=layer.index
                )

    @classmethod
    def random(cls, model: CnnModel, profile: NumericProfile, seed: int = 0) -> 'WeightStore':
        """
        生成确定性的随机权重

        Args:
            model: CNN模型
            profile: 数值精度配置
            seed: 随机种子

        Returns:
            WeightStore
        """
        rng = np.random.default_rng(seed)
        w_lo, w_hi = profile.weight_range
        bias_limit = 1 << min(profile.activation_bits + profile.weight_bits - 2, profile.accumulator_bits - 2, 40)
        layers = {}
        for layer in model.layers:
            weights = rng.integers(w_lo, w_hi, size=layer.weight_shape, endpoint=True, dtype=np.int64)
            if layer.has_bias:
                bias = rng.integers(-bias_limit, bias_limit, size=layer.out_maps, dtype=np.int64)
            else:
                bias = np.zeros(layer.out_maps, dtype=np.int64)
            layers[layer.index] = LayerWeights(weights=weights, bias=bias)
        return cls(layers=layers)
