"""
统计数据模型模块
乘法计数、周期统计、开销分解、资源模型与利用率报告
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

OVERHEAD_CATEGORIES = ('internal_fragmentation', 'padding', 'external_fragmentation', 'pipeline_overhead')


class MacCount(BaseModel):
    """乘累加计数：total含填充零，effective只计输入在界内的乘法"""
    total_macs: int = Field(default=0, ge=0)
    effective_macs: int = Field(default=0, ge=0)

    @model_validator(mode='after')
    def validate_bound(self) -> 'MacCount':
        if self.effective_macs > self.total_macs:
            raise ValueError("effective_macs cannot exceed total_macs")
        return self

    def __add__(self, other: 'MacCount') -> 'MacCount':
        return MacCount(
            total_macs=self.total_macs + other.total_macs,
            effective_macs=self.effective_macs + other.effective_macs
        )


class OverheadBreakdown(BaseModel):
    """乘法器周期开销分解（单位：乘法器·周期）"""
    internal_fragmentation: int = Field(default=0, ge=0)
    padding: int = Field(default=0, ge=0)
    external_fragmentation: int = Field(default=0, ge=0)
    pipeline_overhead: int = Field(default=0, ge=0)

    @property
    def total(self) -> int:
        return sum(getattr(self, name) for name in OVERHEAD_CATEGORIES)

    def __add__(self, other: 'OverheadBreakdown') -> 'OverheadBreakdown':
        return OverheadBreakdown(**{
            name: getattr(self, name) + getattr(other, name) for name in OVERHEAD_CATEGORIES
        })


class LayerStats(BaseModel):
    """单层周期统计"""
    layer_index: int = Field(..., ge=1)
    kind: str = Field(..., description="逐层周期表类型标签")
    cycles_b: int = Field(..., ge=0)
    compute_cycles: int = Field(..., ge=0)
    peak_muls_c: int = Field(..., ge=0)
    effective_muls_a: int = Field(..., ge=0)
    total_macs: int = Field(default=0, ge=0, description="闭式乘法数")
    overhead: OverheadBreakdown = Field(default_factory=OverheadBreakdown)

    @property
    def accounted(self) -> int:
        """有效乘法与全部开销之和，应等于peak_muls_c"""
        return self.effective_muls_a + self.overhead.total


class CycleStats(BaseModel):
    """整次推理的周期统计"""
    m: int = Field(..., ge=1, description="乘法器池大小")
    layers: List[LayerStats] = Field(default_factory=list)

    @property
    def total_cycles(self) -> int:
        return sum(layer.cycles_b for layer in self.layers)

    @property
    def total_peak(self) -> int:
        return sum(layer.peak_muls_c for layer in self.layers)

    @property
    def total_effective(self) -> int:
        return sum(layer.effective_muls_a for layer in self.layers)

    @property
    def total_macs(self) -> int:
        return sum(layer.total_macs for layer in self.layers)

    @property
    def overhead(self) -> OverheadBreakdown:
        total = OverheadBreakdown()
        for layer in self.layers:
            total = total + layer.overhead
        return total

    def fps(self, clock_hz: int) -> float:
        """每秒帧数 = 时钟频率 / 总周期数"""
        cycles = self.total_cycles
        return clock_hz / cycles if cycles else 0.0


class ResourceModel(BaseModel):
    """系统资源构成模型（默认为参考系统的LUT数）"""
    model_config = ConfigDict(frozen=True)

    unit_costs: Dict[str, int] = Field(..., description="各功能单元资源数")
    multiplier_cost: int = Field(..., ge=0, description="SNU中乘法器占用的资源数")
    unit: str = Field(default="LUT")

    @model_validator(mode='after')
    def validate_costs(self) -> 'ResourceModel':
        if any(cost < 0 for cost in self.unit_costs.values()):
            raise ValueError("Resource costs cannot be negative")
        snu = self.unit_costs.get('SNU', 0)
        if self.multiplier_cost > snu:
            raise ValueError(f"multiplier_cost {self.multiplier_cost} exceeds SNU cost {snu}")
        return self

    @property
    def total(self) -> int:
        return sum(self.unit_costs.values())


class LayerReport(BaseModel):
    """报告中的单层条目"""
    L: int
    type: str
    A: int = Field(..., description="有效乘法数")
    A_eq2: int = Field(..., description="闭式乘法数")
    B: int
    C: int
    shares: Dict[str, float] = Field(default_factory=dict)


class UtilizationReport(BaseModel):
    """利用率报告"""
    r_u: float = Field(..., ge=0.0, le=1.0)
    r_c: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    eff_arch: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    overhead_shares: Dict[str, float] = Field(default_factory=dict)
    per_layer: List[LayerReport] = Field(default_factory=list)
    total_cycles: int = 0
    total_effective: int = 0
    total_peak: int = 0
    total_macs_eq2: int = 0
    fps: Optional[float] = None
    reference: Dict[str, float] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)
