"""
硬件神经元（HN）模块
SNU（乘法器+分布式权重存储）、DU（加法树+累加器+Netsum存储）、SU（偏置/激活/池化），
以及把m个乘法器/加法器划分为Q棵加法树的重配置
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from ..config.settings import HwConfig
from ..exceptions.custom_exceptions import AccumulatorOverflowException, ConfigurationException
from ..models.layer_models import LayerSpec
from ..models.numeric_models import NumericProfile
from ..models.stats_models import OverheadBreakdown

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HnConfig:
    """某一k下的HN划分"""
    k: int
    p: int
    q: int
    m: int

    @property
    def leaves(self) -> int:
        """每棵加法树的叶子数 k·k·P"""
        return self.k * self.k * self.p

    @property
    def multipliers_used(self) -> int:
        return self.q * self.leaves

    @property
    def idle_multipliers(self) -> int:
        """未纳入划分的乘法器数（外部碎片来源）"""
        return self.m - self.multipliers_used

    @property
    def adder_tree_shape(self) -> Tuple[int, int]:
        return self.q, self.leaves


def configure_hn(hw: HwConfig, k: int, q: Optional[int] = None) -> HnConfig:
    """
    按滤波器尺寸重配置乘法器/加法器池

    Args:
        hw: 硬件参数
        k: 滤波器尺寸
        q: 覆盖配置表中的HN数量

    Returns:
        HnConfig

    Raises:
        ConfigurationException: 配置表中没有k，或 q·k·k·p > m
    """
    shape = hw.shape_for(k)
    if shape is None:
        raise ConfigurationException(f"no hardware configuration for k={k}")
    config = HnConfig(k=k, p=shape.p, q=q if q is not None else shape.q, m=hw.m)
    if config.multipliers_used > hw.m:
        raise ConfigurationException(
            f"k={k}: q*k*k*p = {config.multipliers_used} exceeds the multiplier pool m={hw.m}"
        )
    logger.debug(f"Configured k={k}: p={config.p}, q={config.q}, {config.idle_multipliers} multipliers idle")
    return config


def slot_tally(config: HnConfig, assigned: int, lanes: int, valid_taps: int, cycles: int) -> OverheadBreakdown:
    """
    乘法器活动统计：把 cycles·m 个乘法器周期划分为有效乘法与各类开销

    Args:
        config: HN划分
        assigned: 分配了真实输出图的HN数
        lanes: 承载真实输入图的读口数
        valid_taps: 这些周期内单个读口窗口中界内抽头数之和
        cycles: 周期数

    Returns:
        开销分解；有效乘法数为 assigned·lanes·valid_taps
    """
    kk = config.k * config.k
    return OverheadBreakdown(
        padding=assigned * lanes * (cycles * kk - valid_taps),
        internal_fragmentation=((config.q - assigned) * kk * config.p + assigned * (config.p - lanes) * kk) * cycles,
        external_fragmentation=config.idle_multipliers * cycles
    )


def _identity_pool(value: np.ndarray) -> np.ndarray:
    return value


@dataclass
class HnState:
    """单个HN的存储状态"""
    weight_mem: np.ndarray
    netsum_mem: np.ndarray
    bias_mem: np.ndarray
    weight_addr: int = 0


@dataclass
class HardwareNeuron:
    """
    硬件神经元

    weight_mem 形状为 (k·k·P, 地址数)，第a列是第a个pass使用的权重；
    bias_mem[i] 是第i个输出pass上该HN负责的输出图偏置。
    """
    index: int
    config: HnConfig
    profile: NumericProfile
    state: Optional[HnState] = None
    passes_c: int = 1
    positions: int = 1
    cycle: int = 0
    pooling: Callable[[np.ndarray], np.ndarray] = field(default=_identity_pool)

    def load_layer(self, weight_mem: np.ndarray, bias_mem: np.ndarray, passes_c: int, positions: int) -> None:
        """执行SOT行前预装该层权重与偏置"""
        self.state = HnState(
            weight_mem=np.asarray(weight_mem, dtype=np.int64),
            netsum_mem=np.zeros(positions, dtype=np.int64),
            bias_mem=np.asarray(bias_mem, dtype=np.int64)
        )
        self.passes_c = passes_c
        self.positions = positions
        self.cycle = 0

    @property
    def pass_index(self) -> int:
        """当前输入pass编号（0 … ⌈C/P⌉−1）"""
        return self.state.weight_addr % self.passes_c

    def snu_step(self, inputs: np.ndarray) -> np.ndarray:
        """SNU：k·k·P个输入与当前地址的权重逐一相乘"""
        return np.asarray(inputs, dtype=np.int64) * self.state.weight_mem[:, self.state.weight_addr]

    def du_step(self, products: np.ndarray, pass_index: int, pos: int) -> Optional[int]:
        """
        DU：加法树求和并在Netsum存储中累加

        Args:
            products: SNU乘积
            pass_index: 输入pass编号
            pos: 输出位置

        Returns:
            最后一个输入pass时返回累加结果，否则None

        Raises:
            AccumulatorOverflowException: 累加超出累加器位宽
        """
        tree_sum = int(products.sum())
        if pass_index == 0:
            netsum = tree_sum
        else:
            netsum = int(self.state.netsum_mem[pos]) + tree_sum
        acc_lo, acc_hi = self.profile.accumulator_range
        if not acc_lo <= netsum <= acc_hi:
            raise AccumulatorOverflowException(
                f"HN {self.index}: netsum {netsum} at position {pos} exceeds "
                f"{self.profile.accumulator_bits}-bit accumulator"
            )
        self.state.netsum_mem[pos] = netsum
        if pass_index == self.passes_c - 1:
            return netsum
        return None

    def su_step(self, netsum: int, layer: LayerSpec, f: int) -> int:
        """SU：偏置、激活函数、重量化，池化钩子默认恒等"""
        bias = self.state.bias_mem[f // self.config.q]
        value = self.profile.finalize(netsum, layer, bias)
        return int(self.pooling(value))

    def step(self, inputs: np.ndarray, pos: int) -> Tuple[np.ndarray, int, Optional[int]]:
        """
        一个时钟周期：SNU → DU，并推进权重地址（每W·H个周期加1）

        Returns:
            (乘积, 加法树和, 最终累加值或None)
        """
        products = self.snu_step(inputs)
        netsum = self.du_step(products, self.pass_index, pos)
        self.cycle += 1
        self.state.weight_addr = self.cycle // self.positions
        return products, int(products.sum()), netsum
