"""
阶段操作表（SOT）数据模型
每一行对应一个卷积层的全部控制信号
"""

from typing import List

from pydantic import BaseModel, ConfigDict, Field

from .layer_models import Activation, LayerKind, LayerSpec

# 二进制行的字段顺序
SOT_FIELDS = (
    'layer_index', 'kind', 'k', 'p', 'q', 'stride',
    'w_in', 'h_in', 'w_out', 'h_out', 'c_in', 'f_out',
    'passes_c', 'passes_f', 'read_base', 'write_base',
    'weight_base', 'activation', 'bias_base', 'has_bias',
)


class SotRow(BaseModel):
    """SOT中的一行"""
    model_config = ConfigDict(frozen=True)

    layer_index: int = Field(..., ge=1)
    kind: LayerKind
    k: int = Field(..., ge=1)
    p: int = Field(..., ge=1)
    q: int = Field(..., ge=1)
    stride: int = Field(..., ge=1)
    w_in: int = Field(..., ge=1)
    h_in: int = Field(..., ge=1)
    w_out: int = Field(..., ge=1)
    h_out: int = Field(..., ge=1)
    c_in: int = Field(..., ge=1)
    f_out: int = Field(..., ge=1)
    passes_c: int = Field(..., ge=1)
    passes_f: int = Field(..., ge=1)
    read_base: int = Field(..., ge=0)
    write_base: int = Field(..., ge=0)
    weight_base: int = Field(..., ge=0)
    activation: Activation
    bias_base: int = Field(..., ge=0)
    has_bias: bool = Field(default=True, description="是否启用偏置存储")

    @property
    def is_depthwise(self) -> bool:
        return self.kind == LayerKind.DW3X3

    @property
    def positions(self) -> int:
        return self.w_out * self.h_out

    @property
    def out_maps(self) -> int:
        return self.c_in if self.is_depthwise else self.f_out

    @property
    def lanes(self) -> int:
        """每周期从MAU读出的字数"""
        return self.q if self.is_depthwise else self.p

    @property
    def compute_cycles(self) -> int:
        return self.passes_c * self.passes_f * self.positions

    def layer_spec(self) -> LayerSpec:
        """还原执行该行所需的层形状（SU的激活与重量化依赖它）"""
        return LayerSpec(
            index=self.layer_index, kind=self.kind,
            w_in=self.w_in, h_in=self.h_in, w_out=self.w_out, h_out=self.h_out,
            c_in=self.c_in, f_out=self.f_out, k=self.k, stride=self.stride,
            activation=self.activation, has_bias=self.has_bias
        )

    def to_words(self) -> List[int]:
        """按二进制字段顺序展开为整数列表"""
        values = self.model_dump()
        values['kind'] = self.kind.code
        values['activation'] = self.activation.code
        return [int(values[name]) for name in SOT_FIELDS]

    @classmethod
    def from_words(cls, words: List[int]) -> 'SotRow':
        values = dict(zip(SOT_FIELDS, (int(w) for w in words)))
        values['kind'] = LayerKind.from_code(values['kind'])
        values['activation'] = Activation.from_code(values['activation'])
        if values['has_bias'] not in (0, 1):
            raise ValueError(f"has_bias word must be 0 or 1, got {values['has_bias']}")
        values['has_bias'] = bool(values['has_bias'])
        return cls(**values)


class SotProgram(BaseModel):
    """SOT程序：按层顺序排列的行"""
    model_config = ConfigDict(frozen=True)

    name: str = Field(default="sot", description="程序名，编译时取模型名")
    rows: List[SotRow] = Field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def row(self, layer_index: int) -> SotRow:
        for row in self.rows:
            if row.layer_index == layer_index:
                return row
        raise IndexError(f"SOT has no row for layer {layer_index}")
