"""
存储阵列单元（MAU）模块
R个双口存储体，写端经桶形移位器、读端经选择器；
第f个特征图完整存放在第 f % R 个存储体中
"""

import logging
import math
from typing import Dict, Iterable, Tuple

import numpy as np

from ..exceptions.custom_exceptions import BankConflictException, CapacityException
from ..models.tensor_models import FeatureMapTensor

logger = logging.getLogger(__name__)


def region_words(maps: int, w: int, h: int, r: int) -> int:
    """c个W×H特征图在单个存储体中占用的字数"""
    return math.ceil(maps / r) * w * h


class MemoryArrayUnit:
    """存储阵列单元"""

    def __init__(self, r: int = 32, depth: int = 131072):
        """
        初始化MAU

        Args:
            r: 存储体数量
            depth: 每个存储体的字数
        """
        self.r = r
        self.depth = depth
        self.banks = np.zeros((r, depth), dtype=np.int64)
        self.write_shift = 0
        self.read_select = 0
        # 本周期暂存的写操作：bank -> (addr, value)，周期结束时提交
        self._staged: Dict[int, Tuple[int, int]] = {}
        self.read_count = 0
        self.write_count = 0

    def _address(self, base: int, f: int, pos: int, w: int, h: int) -> Tuple[int, int]:
        bank = f % self.r
        addr = base + (f // self.r) * w * h + pos
        if not 0 <= addr < self.depth:
            raise CapacityException(f"Address {addr} of map {f} outside bank depth {self.depth}")
        return bank, addr

    def write(self, f: int, addr: int, value: int, base: int, w_out: int, h_out: int) -> None:
        """
        写入一个输出值（本周期暂存，commit时生效）

        Args:
            f: 输出特征图编号
            addr: 线性位置 x + y·w_out
            value: 激活值
            base: 该层写区域基址
            w_out, h_out: 输出特征图尺寸

        Raises:
            BankConflictException: 同一周期内两次写入同一存储体
        """
        if not 0 <= addr < w_out * h_out:
            raise IndexError(f"Write address {addr} outside {w_out}x{h_out} map")
        bank, physical = self._address(base, f, addr, w_out, h_out)
        if bank in self._staged:
            raise BankConflictException(
                f"Two writes to bank {bank} in one cycle (map {f}, address {addr})", bank=bank
            )
        self._staged[bank] = (physical, int(value))

    def commit(self) -> None:
        """周期结束：提交暂存写操作"""
        for bank, (addr, value) in self._staged.items():
            self.banks[bank, addr] = value
        self.write_count += len(self._staged)
        self._staged.clear()

    def read_channels(self, channels: Iterable[int], pos: int, base: int, c_in: int,
                      w: int, h: int) -> np.ndarray:
        """
        按选择器读出若干特征图同一位置的值，超出c_in的通道读出0

        Args:
            channels: 每个读口对应的特征图编号
            pos: 线性位置 x + y·w
            base: 读区域基址
            c_in: 输入特征图数
            w, h: 特征图尺寸

        Returns:
            每个读口的值
        """
        channels = list(channels)
        if channels:
            self.read_select = channels[0] % self.r
        values = np.zeros(len(channels), dtype=np.int64)
        for lane, c in enumerate(channels):
            if c < c_in:
                bank, addr = self._address(base, c, pos, w, h)
                values[lane] = self.banks[bank, addr]
        self.read_count += len(channels)
        return values

    def read(self, t: int, base: int, c_in: int, w: int, h: int, p: int) -> np.ndarray:
        """
        读调度：第t个周期读出P个连续特征图在扫描位置上的值

        Args:
            t: 层内周期编号
            base: 读区域基址
            c_in: 输入特征图数
            w, h: 输入特征图尺寸
            p: 组宽P

        Returns:
            P个值
        """
        group, pos = divmod(t, w * h)
        return self.read_channels(range(group * p, group * p + p), pos, base, c_in, w, h)

    def set_write_shift(self, first_map: int) -> None:
        """设置桶形移位器偏移，使第n个HN写入存储体 (first_map + n) % R"""
        self.write_shift = first_map % self.r

    def write_block(self, maps: Iterable[int], values: np.ndarray, base: int, w_out: int, h_out: int) -> None:
        """
        一个pass内Q个HN的全部输出一次性写入（向量化路径）

        Args:
            maps: 每个HN对应的输出特征图编号
            values: 形状 (len(maps), w_out·h_out)
            base: 写区域基址
            w_out, h_out: 输出尺寸

        Raises:
            BankConflictException: 同一pass内两个HN指向同一存储体
        """
        maps = list(maps)
        banks = [f % self.r for f in maps]
        if len(set(banks)) != len(banks):
            duplicate = next(b for b in banks if banks.count(b) > 1)
            raise BankConflictException(f"Concurrent writes to bank {duplicate} in one cycle", bank=duplicate)
        npos = w_out * h_out
        for f, row in zip(maps, values):
            bank, addr = self._address(base, f, 0, w_out, h_out)
            if addr + npos > self.depth:
                raise CapacityException(f"Map {f} at address {addr} overruns bank depth {self.depth}")
            self.banks[bank, addr:addr + npos] = row
        self.write_count += len(maps) * npos

    def store_tensor(self, tensor: FeatureMapTensor, base: int) -> None:
        """按存放规则预装整个张量（如输入图像）"""
        if base + region_words(tensor.c, tensor.w, tensor.h, self.r) > self.depth:
            raise CapacityException(
                f"Tensor of shape {tensor.shape} at base {base} exceeds bank depth {self.depth}"
            )
        npos = tensor.w * tensor.h
        for f in range(tensor.c):
            bank, addr = self._address(base, f, 0, tensor.w, tensor.h)
            self.banks[bank, addr:addr + npos] = tensor.plane(f).ravel()
        logger.debug(f"Stored tensor of shape {tensor.shape} at base {base}")

    def load_tensor(self, base: int, maps: int, w: int, h: int) -> FeatureMapTensor:
        """按存放规则读回整个张量"""
        npos = w * h
        data = np.empty((maps, h, w), dtype=np.int64)
        for f in range(maps):
            bank, addr = self._address(base, f, 0, w, h)
            data[f] = self.banks[bank, addr:addr + npos].reshape(h, w)
        return FeatureMapTensor(data)
