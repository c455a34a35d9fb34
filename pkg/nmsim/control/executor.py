"""
SOT执行器模块
逐行执行SOT程序：MAU读 → RU → HN(SNU/DU/SU) → MAU写，并统计乘法器活动

两种执行方式产生逐位相同的张量与统计：
- cycle: 逐周期驱动receptor、MAU端口与每个HardwareNeuron
- burst: 按pass向量化计算同一调度
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..config.settings import HwConfig, get_config
from ..exceptions.custom_exceptions import (
    AccumulatorOverflowException,
    ConfigurationException,
    PartitionViolationException,
    ShapeException
)
from ..hardware.memory_array import MemoryArrayUnit
from ..hardware.neuron import HardwareNeuron, HnConfig, slot_tally
from ..hardware.receptor import ReceptorUnit, extract_windows
from ..models.layer_models import LayerSpec
from ..models.numeric_models import NumericProfile
from ..models.sot_models import SotProgram, SotRow
from ..models.stats_models import CycleStats, LayerStats, OverheadBreakdown
from ..models.tensor_models import FeatureMapTensor, LayerWeights, WeightStore
from ..oracle.reference import count_mul_eq2
from .sot_compiler import predict_cycles

logger = logging.getLogger(__name__)

EXECUTION_MODES = ('cycle', 'burst', 'auto')


@dataclass(frozen=True)
class HnEvent:
    """单个HN在一个周期内的活动记录"""
    layer_index: int
    cycle: int
    hn: int
    pass_index: int
    pos: int
    products: Tuple[int, ...]
    tree_sum: int
    accumulator: int
    output: Optional[int]


HnObserver = Callable[[HnEvent], None]


@dataclass(frozen=True)
class PortActivity:
    """逐周期执行时一层的MAU读字数与RU送往HN的字数"""
    reads: int
    delivered: int


@dataclass
class _LayerRun:
    compute_cycles: int
    effective: int
    overhead: OverheadBreakdown


def _padded_weights(row: SotRow, entry: LayerWeights) -> Tuple[np.ndarray, np.ndarray]:
    """按 (passes_f·Q, passes_c·P) 补零的权重与按 passes_f·Q 补零的偏置（has_bias为假时全零）"""
    maps = row.passes_f * row.q
    channels = 1 if row.is_depthwise else row.passes_c * row.p
    weights = np.zeros((maps, channels, row.k, row.k), dtype=np.int64)
    weights[:entry.weights.shape[0], :entry.weights.shape[1]] = entry.weights
    bias = np.zeros(maps, dtype=np.int64)
    # 无偏置的层不启用偏置存储
    if row.has_bias:
        bias[:entry.bias.shape[0]] = entry.bias
    return weights, bias


class SotExecutor:
    """SOT程序执行器（每个实例单线程使用）"""

    def __init__(self, hw: HwConfig, profile: NumericProfile, mode: str = 'auto',
                 cycle_mode_limit: Optional[int] = None, observer: Optional[HnObserver] = None,
                 layer_modes: Optional[Dict[int, str]] = None, hn_shuffle_seed: Optional[int] = None):
        """
        初始化执行器

        Args:
            hw: 硬件参数
            profile: 数值精度配置
            mode: 'cycle'、'burst' 或 'auto'
            cycle_mode_limit: auto模式下逐周期执行的HN步数上限，默认取全局配置
            observer: 逐周期模式下每个HN步的回调
            layer_modes: 按层编号覆盖执行方式
            hn_shuffle_seed: 给定时逐周期模式每个周期按随机顺序驱动HN
        """
        for requested in [mode, *(layer_modes or {}).values()]:
            if requested not in EXECUTION_MODES:
                raise ConfigurationException(f"Unknown execution mode '{requested}', expected one of {EXECUTION_MODES}")
        self.hw = hw
        self.profile = profile
        self.mode = mode
        self.cycle_mode_limit = cycle_mode_limit if cycle_mode_limit is not None else get_config().cycle_mode_limit
        self.observer = observer
        self.layer_modes = layer_modes or {}
        self.hn_shuffle_seed = hn_shuffle_seed
        self.port_activity: Dict[int, PortActivity] = {}

    def _mode_for(self, row: SotRow) -> str:
        mode = self.layer_modes.get(row.layer_index, self.mode)
        if mode == 'auto':
            return 'cycle' if row.compute_cycles * row.q <= self.cycle_mode_limit else 'burst'
        return mode

    def run(self, program: SotProgram, weights: WeightStore, image: FeatureMapTensor,
            stop_after: Optional[int] = None) -> Tuple[List[FeatureMapTensor], CycleStats]:
        """
        执行整个SOT程序

        Args:
            program: SOT程序
            weights: 权重
            image: 输入图像
            stop_after: 执行完该层后停止

        Returns:
            (每层输出, 周期统计)

        Raises:
            ShapeException: 图像或权重与程序不符
            BankConflictException: 同周期写冲突
            AccumulatorOverflowException: 累加器溢出
            PartitionViolationException: 乘法器周期统计不闭合
        """
        stats = CycleStats(m=self.hw.m)
        self.port_activity = {}
        outputs: List[FeatureMapTensor] = []
        if not program.rows:
            return outputs, stats

        first = program.rows[0]
        if image.shape != (first.c_in, first.w_in, first.h_in):
            raise ShapeException(
                f"Image shape {image.shape} does not match layer 1 input "
                f"{(first.c_in, first.w_in, first.h_in)}",
                layer_index=first.layer_index
            )

        mau = MemoryArrayUnit(r=self.hw.r, depth=self.hw.bank_depth)
        mau.store_tensor(image, first.read_base)

        for row in program.rows:
            layer = row.layer_spec()
            entry = weights.for_layer(row.layer_index)
            if entry.weights.shape != layer.weight_shape:
                raise ShapeException(
                    f"Layer {row.layer_index} weights have shape {entry.weights.shape}, expected {layer.weight_shape}",
                    layer_index=row.layer_index
                )

            mode = self._mode_for(row)
            logger.debug(f"Layer {row.layer_index} ({row.kind.value}) running in {mode} mode")
            if mode == 'cycle':
                run = self._run_layer_cycle(mau, row, layer, entry)
            else:
                run = self._run_layer_burst(mau, row, layer, entry)

            stats.layers.append(self._layer_stats(row, layer, run))
            outputs.append(mau.load_tensor(row.write_base, row.out_maps, row.w_out, row.h_out))

            if stop_after is not None and row.layer_index >= stop_after:
                break

        logger.info(f"Executed {len(stats.layers)} SOT rows in {stats.total_cycles} cycles")
        return outputs, stats

    def _layer_stats(self, row: SotRow, layer: LayerSpec, run: _LayerRun) -> LayerStats:
        tail = row.w_out + self.hw.pipeline_overhead_const
        cycles_b = run.compute_cycles + tail
        if cycles_b != predict_cycles(row, self.hw):
            raise PartitionViolationException(
                f"Layer {row.layer_index} ran {cycles_b} cycles, schedule predicts {predict_cycles(row, self.hw)}",
                layer_index=row.layer_index
            )
        overhead = run.overhead + OverheadBreakdown(pipeline_overhead=tail * self.hw.m)
        stats = LayerStats(
            layer_index=row.layer_index,
            kind=row.kind.table_label,
            cycles_b=cycles_b,
            compute_cycles=run.compute_cycles,
            peak_muls_c=cycles_b * self.hw.m,
            effective_muls_a=run.effective,
            total_macs=count_mul_eq2(layer),
            overhead=overhead
        )
        if stats.accounted != stats.peak_muls_c:
            raise PartitionViolationException(
                f"Layer {row.layer_index}: effective + overheads = {stats.accounted}, "
                f"peak = {stats.peak_muls_c}",
                layer_index=row.layer_index
            )
        return stats

    def _pass_shape(self, row: SotRow, pf: int, pc: int) -> Tuple[int, int]:
        """(分配了输出图的HN数, 承载真实输入图的读口数)"""
        if row.is_depthwise:
            return min(row.q, row.c_in - pf * row.q), 1
        return min(row.q, row.f_out - pf * row.q), min(row.p, row.c_in - pc * row.p)

    def _tally(self, config: HnConfig, row: SotRow, valid_by_pass: List[int]) -> Tuple[int, OverheadBreakdown]:
        effective = 0
        overhead = OverheadBreakdown()
        for group, valid in enumerate(valid_by_pass):
            pf, pc = divmod(group, row.passes_c)
            assigned, lanes = self._pass_shape(row, pf, pc)
            effective += assigned * lanes * valid
            overhead = overhead + slot_tally(config, assigned, lanes, valid, row.positions)
        return effective, overhead

    def _load_neurons(self, row: SotRow, entry: LayerWeights, config: HnConfig) -> List[HardwareNeuron]:
        weights, bias = _padded_weights(row, entry)
        kk = row.k * row.k
        neurons = []
        for n in range(row.q):
            own = weights[n::row.q]
            if row.is_depthwise:
                weight_mem = own.reshape(row.passes_f, kk).T
            else:
                weight_mem = own.reshape(row.passes_f * row.passes_c, row.p * kk).T
            neuron = HardwareNeuron(index=n, config=config, profile=self.profile)
            neuron.load_layer(weight_mem, bias[n::row.q], row.passes_c, row.positions)
            neurons.append(neuron)
        return neurons

    def _lane_channels(self, row: SotRow, group: int) -> range:
        if row.is_depthwise:
            return range(group * row.q, group * row.q + row.q)
        pc = group % row.passes_c
        return range(pc * row.p, pc * row.p + row.p)

    def _run_layer_cycle(self, mau: MemoryArrayUnit, row: SotRow, layer: LayerSpec,
                         entry: LayerWeights) -> _LayerRun:
        config = HnConfig(k=row.k, p=row.p, q=row.q, m=self.hw.m)
        neurons = self._load_neurons(row, entry, config)
        ru = ReceptorUnit(row.lanes, row.k, row.w_in, row.h_in, row.stride)

        map_pixels = row.w_in * row.h_in
        stream_length = row.passes_f * row.passes_c * map_pixels
        valid_by_pass = [0] * (row.passes_f * row.passes_c)
        idle = np.zeros(row.lanes, dtype=np.int64)
        rng = np.random.default_rng([self.hn_shuffle_seed, row.layer_index]) \
            if self.hn_shuffle_seed is not None else None
        reads_before = mau.read_count

        cycle = 0
        fed = 0
        while cycle < row.compute_cycles:
            if fed < stream_length:
                group, pixel = divmod(fed, map_pixels)
                pixels = mau.read_channels(self._lane_channels(row, group), pixel,
                                           row.read_base, row.c_in, row.w_in, row.h_in)
            else:
                # 流尾补零，越界抽头均被掩码
                pixels = idle
            fed += 1

            output = ru.step(pixels)
            if output is None:
                continue

            group = cycle // row.positions
            pf = group // row.passes_c
            cx, cy = output.center
            pos = (cy // row.stride) * row.w_out + cx // row.stride
            mau.set_write_shift(pf * row.q)

            # 同一周期内各HN只共享只读输入，驱动顺序不影响结果
            order = rng.permutation(row.q) if rng is not None else range(row.q)
            for n in order:
                n = int(n)
                neuron = neurons[n]
                inputs = output.windows[n].values.ravel() if row.is_depthwise else output.values
                products, tree_sum, netsum = neuron.step(inputs, pos)
                f = pf * row.q + n
                value = None
                if netsum is not None and f < row.out_maps:
                    value = neuron.su_step(netsum, layer, f)
                    mau.write(f, pos, value, row.write_base, row.w_out, row.h_out)
                if self.observer is not None:
                    self.observer(HnEvent(
                        layer_index=row.layer_index, cycle=cycle, hn=n,
                        pass_index=group, pos=pos, products=tuple(int(v) for v in products),
                        tree_sum=tree_sum, accumulator=int(neuron.state.netsum_mem[pos]), output=value
                    ))

            valid_by_pass[group] += int(output.valid.sum())
            mau.commit()
            cycle += 1

        self.port_activity[row.layer_index] = PortActivity(reads=mau.read_count - reads_before,
                                                           delivered=ru.delivered)
        effective, overhead = self._tally(config, row, valid_by_pass)
        return _LayerRun(compute_cycles=cycle, effective=effective, overhead=overhead)

    def _run_layer_burst(self, mau: MemoryArrayUnit, row: SotRow, layer: LayerSpec,
                         entry: LayerWeights) -> _LayerRun:
        config = HnConfig(k=row.k, p=row.p, q=row.q, m=self.hw.m)
        planes = mau.load_tensor(row.read_base, row.c_in, row.w_in, row.h_in).data
        values, valid = extract_windows(planes, row.k, row.stride)
        valid_total = int(valid.sum())
        weights, bias = _padded_weights(row, entry)
        kk = row.k * row.k
        acc_lo, acc_hi = self.profile.accumulator_range

        for pf in range(row.passes_f):
            f0 = pf * row.q
            assigned, _ = self._pass_shape(row, pf, 0)
            netsum = np.zeros((row.q, row.positions), dtype=np.int64)
            for pc in range(row.passes_c):
                if row.is_depthwise:
                    block = values[f0:f0 + assigned]
                    w_block = weights[f0:f0 + assigned, 0].reshape(assigned, kk)
                    netsum[:assigned] += np.einsum('nt,npt->np', w_block, block)
                else:
                    c0 = pc * row.p
                    block = values[c0:c0 + row.p]
                    lanes = block.shape[0]
                    w_block = weights[f0:f0 + row.q, c0:c0 + lanes].reshape(row.q, lanes, kk)
                    netsum += np.einsum('nlt,lpt->np', w_block, block)
                if netsum.min() < acc_lo or netsum.max() > acc_hi:
                    raise AccumulatorOverflowException(
                        f"Layer {row.layer_index}: netsum exceeds {self.profile.accumulator_bits}-bit accumulator"
                    )

            maps = range(f0, f0 + assigned)
            result = self.profile.finalize(netsum[:assigned], layer, bias[f0:f0 + assigned, None])
            mau.set_write_shift(f0)
            mau.write_block(maps, result, row.write_base, row.w_out, row.h_out)

        effective, overhead = self._tally(config, row, [valid_total] * (row.passes_f * row.passes_c))
        return _LayerRun(compute_cycles=row.compute_cycles, effective=effective, overhead=overhead)


def execute(program: SotProgram, weights: WeightStore, image: FeatureMapTensor, hw: HwConfig,
            profile: NumericProfile, mode: str = 'auto',
            cycle_mode_limit: Optional[int] = None) -> Tuple[List[FeatureMapTensor], CycleStats]:
    """
    执行SOT程序（一张图像）

    Args:
        program: SOT程序
        weights: 权重
        image: 输入图像
        hw: 硬件参数
        profile: 数值精度配置
        mode: 执行方式
        cycle_mode_limit: auto模式阈值

    Returns:
        (每层输出, 周期统计)
    """
    return SotExecutor(hw, profile, mode=mode, cycle_mode_limit=cycle_mode_limit).run(program, weights, image)
