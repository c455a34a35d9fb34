"""
SOT编译模块
将CnnModel与HwConfig编译为阶段操作表程序，并给出闭式周期预测
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional

from ..config.settings import HwConfig
from ..exceptions.custom_exceptions import CapacityException
from ..hardware.memory_array import region_words
from ..hardware.neuron import configure_hn
from ..models.layer_models import CnnModel
from ..models.sot_models import SotProgram, SotRow

logger = logging.getLogger(__name__)


@dataclass
class _Region:
    start: int
    end: int
    owner: int


class BankAllocator:
    """
    存储体地址分配器（首次适配）

    所有存储体共用同一地址区间划分，一个区域从分配起到最后一个读取层执行完毕一直有效。
    """

    def __init__(self, depth: int):
        self.depth = depth
        self.regions: List[_Region] = []

    def allocate(self, size: int, owner: int) -> int:
        cursor = 0
        for region in sorted(self.regions, key=lambda r: r.start):
            if region.start - cursor >= size:
                break
            cursor = max(cursor, region.end)
        if cursor + size > self.depth:
            raise CapacityException(
                f"Cannot place {size} words for layer {owner}: bank depth {self.depth} exhausted"
            )
        self.regions.append(_Region(start=cursor, end=cursor + size, owner=owner))
        return cursor

    def release(self, owner: int) -> None:
        self.regions = [region for region in self.regions if region.owner != owner]

    def base_of(self, owner: int) -> int:
        for region in self.regions:
            if region.owner == owner:
                return region.start
        raise KeyError(owner)


def compile_sot(model: CnnModel, hw: HwConfig) -> SotProgram:
    """
    编译SOT程序

    Args:
        model: 已校验的CNN模型
        hw: 硬件参数

    Returns:
        每层一行的SotProgram

    Raises:
        ConfigurationException: 某层的k没有硬件配置
        CapacityException: 特征图超出存储体深度
    """
    allocator = BankAllocator(hw.bank_depth)
    last_use = model.last_use()

    image_c, image_w, image_h = model.input_shape
    allocator.allocate(region_words(image_c, image_w, image_h, hw.r), owner=0)

    rows: List[SotRow] = []
    weight_base = 0
    bias_base = 0
    for layer in model.layers:
        config = configure_hn(hw, layer.k)
        if layer.is_depthwise:
            passes_c = 1
            passes_f = math.ceil(layer.c_in / config.q)
        else:
            passes_c = math.ceil(layer.c_in / config.p)
            passes_f = math.ceil(layer.f_out / config.q)

        read_base = allocator.base_of(layer.source_index)
        write_base = allocator.allocate(region_words(layer.out_maps, layer.w_out, layer.h_out, hw.r),
                                        owner=layer.index)

        rows.append(SotRow(
            layer_index=layer.index, kind=layer.kind, k=layer.k, p=config.p, q=config.q,
            stride=layer.stride, w_in=layer.w_in, h_in=layer.h_in,
            w_out=layer.w_out, h_out=layer.h_out, c_in=layer.c_in, f_out=layer.f_out,
            passes_c=passes_c, passes_f=passes_f, read_base=read_base, write_base=write_base,
            weight_base=weight_base, activation=layer.activation, bias_base=bias_base,
            has_bias=layer.has_bias
        ))
        weight_base += passes_c * passes_f
        bias_base += passes_f

        for owner, last in last_use.items():
            if last == layer.index:
                allocator.release(owner)

    logger.info(f"Compiled SOT for '{model.name}': {len(rows)} rows")
    return SotProgram(name=model.name, rows=rows)


def predict_cycles(row: SotRow, hw: HwConfig) -> int:
    """
    闭式周期预测：passes_c·passes_f·W_out·H_out + W_out + D

    Args:
        row: SOT行
        hw: 硬件参数

    Returns:
        该层周期数B
    """
    return row.compute_cycles + row.w_out + hw.pipeline_overhead_const


def predict_program(program: SotProgram, hw: HwConfig) -> Dict[int, int]:
    """对整个程序逐行预测周期数"""
    return {row.layer_index: predict_cycles(row, hw) for row in program.rows}


def program_fps(program: SotProgram, hw: HwConfig, total_cycles: Optional[int] = None) -> float:
    """每秒帧数 = clock_hz / 总周期数"""
    total = total_cycles if total_cycles is not None else sum(predict_program(program, hw).values())
    return hw.clock_hz / total if total else 0.0
