"""
接收单元（RU）模块
receptor由k个W级移位寄存器阵列串联组成，配合掩码电路每周期输出
一个补零后的k×k感受野窗口；k=1时输入直通
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np

IntOrArray = Union[int, np.ndarray]


def tap_offsets(k: int) -> Tuple[np.ndarray, np.ndarray]:
    """窗口抽头相对中心的偏移 (dy, dx)，形状均为 (k, k)"""
    h = k // 2
    offsets = np.arange(-h, h + 1)
    dy, dx = np.meshgrid(offsets, offsets, indexing='ij')
    return dy, dx


def tap_validity(cx: IntOrArray, cy: IntOrArray, w: int, h: int, k: int) -> np.ndarray:
    """
    掩码电路：判断以 (cx, cy) 为中心的每个抽头是否落在特征图内

    Args:
        cx, cy: 中心坐标（标量或形状相同的数组）
        w, h: 特征图尺寸
        k: 窗口尺寸

    Returns:
        布尔数组，形状 (..., k, k)
    """
    dy, dx = tap_offsets(k)
    x = np.asarray(cx)[..., None, None] + dx
    y = np.asarray(cy)[..., None, None] + dy
    return (x >= 0) & (x < w) & (y >= 0) & (y < h)


@dataclass(frozen=True)
class MaskedWindow:
    """补零后的k×k窗口，values[dy][dx]"""
    values: np.ndarray
    center: Tuple[int, int]
    valid: np.ndarray

    @property
    def valid_taps(self) -> int:
        return int(self.valid.sum())


class Receptor:
    """
    行缓冲receptor

    寄存器链按年龄排列，registers[0]为最新输入。以t为掩码时刻，中心为
    (t mod W, ⌊(t mod WH)/W⌋)，抽头 (dx, dy) 位于年龄 (h−dy)·W + (h−dx) 处。
    """

    def __init__(self, k: int, w: int, h: int):
        self.k = k
        self.w = w
        self.h = h
        half = k // 2
        # 窄图（W < k）需要额外 k−W 个寄存器才能容纳左上角抽头
        self.registers = np.zeros(max(k * w, (k - 1) * w + k), dtype=np.int64)
        self.received = 0
        dy, dx = tap_offsets(k)
        self._ages = (half - dy) * w + (half - dx)

    @property
    def fill_latency(self) -> int:
        """首个窗口完成前需要输入的像素数 W·⌊k/2⌋ + ⌊k/2⌋"""
        half = self.k // 2
        return self.w * half + half

    @property
    def t(self) -> int:
        """当前掩码时刻，填充期间为负"""
        return self.received - 1 - self.fill_latency

    def reset(self) -> None:
        self.registers[:] = 0
        self.received = 0

    def center_at(self, t: int) -> Tuple[int, int]:
        local = t % (self.w * self.h)
        return local % self.w, local // self.w

    def step(self, pixel: int) -> Optional[MaskedWindow]:
        """
        输入一个像素并移位

        Args:
            pixel: 新输入的激活值

        Returns:
            填充完成后返回当前中心的补零窗口，否则返回None
        """
        self.registers[1:] = self.registers[:-1]
        self.registers[0] = pixel
        self.received += 1

        t = self.t
        if t < 0:
            return None
        cx, cy = self.center_at(t)
        valid = tap_validity(cx, cy, self.w, self.h, self.k)
        values = np.where(valid, self.registers[self._ages], 0)
        return MaskedWindow(values=values, center=(cx, cy), valid=valid)


class StridedReceptor:
    """步长s的receptor：只输出中心位于 (s·x, s·y) 的窗口"""

    def __init__(self, receptor: Receptor, stride: int):
        self.receptor = receptor
        self.stride = stride

    def step(self, pixel: int) -> Optional[MaskedWindow]:
        window = self.receptor.step(pixel)
        if window is None:
            return None
        cx, cy = window.center
        if cx % self.stride or cy % self.stride:
            return None
        return window


@dataclass(frozen=True)
class RuOutput:
    """RU单周期输出：P个窗口共享同一中心"""
    windows: List[MaskedWindow]

    @property
    def center(self) -> Tuple[int, int]:
        return self.windows[0].center

    @property
    def valid(self) -> np.ndarray:
        return self.windows[0].valid

    @property
    def values(self) -> np.ndarray:
        """k·k·P个值，按读口顺序拼接"""
        return np.concatenate([window.values.ravel() for window in self.windows])


class ReceptorUnit:
    """P个receptor组成的接收单元"""

    def __init__(self, lanes: int, k: int, w: int, h: int, stride: int = 1):
        """
        Args:
            lanes: 读口数（标准/1×1层为P，DW层为Q）
            k: 窗口尺寸
            w, h: 输入特征图尺寸
            stride: 步长
        """
        self.lanes = lanes
        self.k = k
        self.w = w
        self.h = h
        self.stride = stride
        self.received = 0
        self.delivered = 0
        self.receptors = [StridedReceptor(Receptor(k, w, h), stride) for _ in range(lanes)] if k > 1 else []

    @property
    def fill_latency(self) -> int:
        half = self.k // 2
        return self.w * half + half

    def step(self, pixels: np.ndarray) -> Optional[RuOutput]:
        """
        每周期接收P个像素

        Args:
            pixels: 本周期MAU读出的P个值

        Returns:
            k·k·P个窗口值，填充期间或非步长格点时为None
        """
        self.received += 1
        if self.k == 1:
            output = self._bypass(pixels)
        else:
            windows = [receptor.step(int(pixel)) for receptor, pixel in zip(self.receptors, pixels)]
            output = None if windows[0] is None else RuOutput(windows=windows)
        if output is not None:
            self.delivered += self.k * self.k * self.lanes
        return output

    def _bypass(self, pixels: np.ndarray) -> Optional[RuOutput]:
        local = (self.received - 1) % (self.w * self.h)
        cx, cy = local % self.w, local // self.w
        if cx % self.stride or cy % self.stride:
            return None
        valid = np.ones((1, 1), dtype=bool)
        windows = [MaskedWindow(values=np.array([[int(pixel)]], dtype=np.int64), center=(cx, cy), valid=valid)
                   for pixel in pixels]
        return RuOutput(windows=windows)


def extract_windows(planes: np.ndarray, k: int, stride: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    """
    直接从张量提取全部补零窗口（receptor行为的向量化等价物）

    Args:
        planes: 输入特征图，形状 (C, H, W)
        k: 窗口尺寸
        stride: 步长

    Returns:
        (values 形状 (C, npos, k·k), valid 形状 (npos, k·k))，npos按输出位置光栅顺序
    """
    _, h, w = planes.shape
    w_out = -(-w // stride)
    h_out = -(-h // stride)
    cy = np.repeat(stride * np.arange(h_out), w_out)
    cx = np.tile(stride * np.arange(w_out), h_out)

    valid = tap_validity(cx, cy, w, h, k)
    dy, dx = tap_offsets(k)
    ty = np.clip(cy[:, None, None] + dy, 0, h - 1)
    tx = np.clip(cx[:, None, None] + dx, 0, w - 1)
    values = np.where(valid, planes[:, ty, tx], 0)

    npos = w_out * h_out
    return values.reshape(planes.shape[0], npos, k * k), valid.reshape(npos, k * k)
