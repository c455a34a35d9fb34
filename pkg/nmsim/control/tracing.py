"""
调试追踪模块
生成receptor逐周期轨迹与单个HN的逐周期乘积/累加轨迹
"""

import logging
from typing import Any, Dict, List, Optional

import numpy as np

from ..config.settings import HwConfig
from ..exceptions.custom_exceptions import ShapeException
from ..hardware.receptor import Receptor
from ..models.numeric_models import NumericProfile
from ..models.sot_models import SotProgram
from ..models.tensor_models import FeatureMapTensor, WeightStore
from .executor import HnEvent, SotExecutor

logger = logging.getLogger(__name__)

RECEPTOR_COLUMNS = ('t', 'input', 'registers', 'x', 'y', 'output')
HN_COLUMNS = ('cycle', 'pass', 'pos', 'products', 'tree_sum', 'accumulator', 'output')


def _join(values) -> str:
    return ' '.join(str(int(v)) for v in np.asarray(values).ravel())


def trace_receptor(planes: np.ndarray, k: int, start: int, stop: int) -> List[Dict[str, Any]]:
    """
    将若干特征图首尾相接送入单个receptor并记录轨迹

    Args:
        planes: 特征图，形状 (G, H, W)
        k: 窗口尺寸
        start, stop: 掩码时刻区间 [start, stop]，填充期间的时刻为负

    Returns:
        轨迹行列表，列为 t, input, registers, x, y, output
    """
    maps, h, w = planes.shape
    receptor = Receptor(k, w, h)
    stream = np.concatenate([planes.reshape(-1), np.zeros(receptor.fill_latency, dtype=np.int64)])

    rows: List[Dict[str, Any]] = []
    for pixel in stream:
        window = receptor.step(int(pixel))
        t = receptor.t
        if t > stop:
            break
        if t < start:
            continue
        rows.append({
            't': t,
            'input': int(pixel),
            'registers': _join(receptor.registers),
            'x': window.center[0] if window is not None else '',
            'y': window.center[1] if window is not None else '',
            'output': _join(window.values) if window is not None else ''
        })
    logger.debug(f"Traced receptor over {maps} maps of {w}x{h}: {len(rows)} rows")
    return rows


def _layer_input(program: SotProgram, weights: Optional[WeightStore], image: FeatureMapTensor,
                 hw: HwConfig, profile: NumericProfile, layer_index: int) -> FeatureMapTensor:
    row = program.row(layer_index)
    # 该层之前最后一个写入其读区域的行就是数据来源；没有则读取输入图像
    producers = [candidate for candidate in program.rows
                 if candidate.layer_index < layer_index and candidate.write_base == row.read_base
                 and (candidate.out_maps, candidate.w_out, candidate.h_out) == (row.c_in, row.w_in, row.h_in)]
    if not producers:
        return image
    if weights is None:
        raise ShapeException(f"Tracing layer {layer_index} requires weights for the preceding layers",
                             layer_index=layer_index)
    executor = SotExecutor(hw, profile, mode='burst')
    outputs, _ = executor.run(program, weights, image, stop_after=producers[-1].layer_index)
    return outputs[-1]


def trace_receptor_layer(program: SotProgram, weights: Optional[WeightStore], image: FeatureMapTensor,
                         hw: HwConfig, profile: NumericProfile, layer_index: int,
                         start: int, stop: int) -> List[Dict[str, Any]]:
    """追踪某层第一个receptor：按该层的读调度依次扫描全部输入特征图"""
    row = program.row(layer_index)
    source = _layer_input(program, weights, image, hw, profile, layer_index)
    return trace_receptor(source.data, row.k, start, stop)


def trace_hn(program: SotProgram, weights: WeightStore, image: FeatureMapTensor, hw: HwConfig,
             profile: NumericProfile, layer_index: int, hn_index: int,
             start: int, stop: int) -> List[Dict[str, Any]]:
    """
    逐周期执行指定层并记录单个HN的乘积、加法树和与累加值

    Args:
        program: SOT程序
        weights: 权重
        image: 输入图像
        hw: 硬件参数
        profile: 数值精度配置
        layer_index: 层编号
        hn_index: HN编号
        start, stop: 周期区间 [start, stop]

    Returns:
        轨迹行列表
    """
    rows: List[Dict[str, Any]] = []

    def collect(event: HnEvent) -> None:
        if event.hn == hn_index and start <= event.cycle <= stop:
            rows.append({
                'cycle': event.cycle,
                'pass': event.pass_index,
                'pos': event.pos,
                'products': _join(event.products),
                'tree_sum': event.tree_sum,
                'accumulator': event.accumulator,
                'output': '' if event.output is None else event.output
            })

    executor = SotExecutor(hw, profile, mode='burst', observer=collect, layer_modes={layer_index: 'cycle'})
    executor.run(program, weights, image, stop_after=layer_index)
    return rows
