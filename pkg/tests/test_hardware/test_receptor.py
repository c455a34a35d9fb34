"""
接收单元测试用例
"""

import numpy as np
import pytest

from nmsim.control.tracing import trace_receptor
from nmsim.hardware.receptor import Receptor, ReceptorUnit, StridedReceptor, extract_windows, tap_validity


def _stream_windows(plane, k, stride):
    """把单个特征图加补零尾流送入receptor，收集全部输出窗口"""
    h, w = plane.shape
    receptor = StridedReceptor(Receptor(k, w, h), stride)
    flush = receptor.receptor.fill_latency
    windows = []
    for pixel in np.concatenate([plane.ravel(), np.zeros(flush, dtype=np.int64)]):
        window = receptor.step(int(pixel))
        if window is not None:
            windows.append(window)
    return windows


class TestTapValidity:
    """掩码电路测试"""

    def test_corner(self):
        """测试角点只有4个抽头在界内"""
        valid = tap_validity(0, 0, 5, 4, 3)
        assert valid.sum() == 4
        assert valid.tolist() == [[False, False, False], [False, True, True], [False, True, True]]

    def test_vectorized(self):
        """测试对中心数组批量判断"""
        valid = tap_validity(np.array([0, 2]), np.array([0, 1]), 5, 4, 3)
        assert valid.shape == (2, 3, 3)
        assert valid[1].all()


class TestReceptorTrace:
    """receptor逐周期轨迹测试（5x4特征图）"""

    @pytest.fixture
    def rows(self):
        first = np.arange(1, 21).reshape(4, 5)
        second = np.arange(101, 121).reshape(4, 5)
        return trace_receptor(np.stack([first, second]), 3, 0, 20)

    def test_fill_latency(self):
        """测试填充延迟为 W·⌊k/2⌋ + ⌊k/2⌋"""
        assert Receptor(3, 5, 4).fill_latency == 6
        assert Receptor(3, 5, 4).registers.size == 15

    def test_columns(self, rows):
        """测试轨迹列结构"""
        assert list(rows[0]) == ['t', 'input', 'registers', 'x', 'y', 'output']
        assert [row['t'] for row in rows] == list(range(21))

    @pytest.mark.parametrize('t, centre, window', [
        (0, (0, 0), "0 0 0 0 1 2 0 6 7"),
        (1, (1, 0), "0 0 0 1 2 3 6 7 8"),
        (4, (4, 0), "0 0 0 4 5 0 9 10 0"),
        (5, (0, 1), "0 1 2 0 6 7 0 11 12"),
        (19, (4, 3), "14 15 0 19 20 0 0 0 0"),
        (20, (0, 0), "0 0 0 0 101 102 0 106 107"),
    ])
    def test_masked_windows(self, rows, t, centre, window):
        """测试各时刻的中心位置与补零窗口"""
        row = rows[t]
        assert (row['x'], row['y']) == centre
        assert row['output'] == window

    def test_input_leads_output(self, rows):
        """测试t时刻输入的是第 t+L 个像素"""
        assert rows[0]['input'] == 7
        assert rows[0]['registers'].split()[0] == '7'

    def test_no_window_during_fill(self):
        """测试填充期间没有输出"""
        receptor = Receptor(3, 5, 4)
        assert all(receptor.step(1) is None for _ in range(6))
        assert receptor.step(1) is not None


class TestReceptorConformance:
    """receptor流式输出与直接窗口提取一致"""

    @pytest.mark.parametrize('w, h', [(5, 4), (1, 3), (2, 2), (7, 1), (1, 1)])
    @pytest.mark.parametrize('stride', [1, 2])
    def test_matches_extract_windows(self, w, h, stride):
        plane = np.random.default_rng(w * 10 + h).integers(-50, 50, size=(h, w))
        windows = _stream_windows(plane, 3, stride)
        values, valid = extract_windows(plane[None], 3, stride)
        assert len(windows) == values.shape[1]
        for n, window in enumerate(windows):
            assert window.values.ravel().tolist() == values[0, n].tolist()
            assert window.valid.ravel().tolist() == valid[n].tolist()


class TestReceptorUnit:
    """接收单元测试"""

    def test_lanes_share_centre(self):
        """测试P个receptor同步输出同一中心"""
        ru = ReceptorUnit(2, 3, 2, 2)
        outputs = [ru.step(np.array([v, 10 * v])) for v in (1, 2, 3, 4, 0, 0, 0)]
        emitted = [output for output in outputs if output is not None]
        assert len(emitted) == 4
        assert emitted[0].center == (0, 0)
        assert emitted[0].values.size == 18
        assert emitted[0].values[9:].tolist() == [10 * v for v in emitted[0].values[:9].tolist()]

    def test_one_by_one_bypass(self):
        """测试k=1时输入直通，步长2只保留格点"""
        ru = ReceptorUnit(1, 1, 3, 2, stride=2)
        outputs = [ru.step(np.array([v])) for v in range(6)]
        assert [output.values.tolist() for output in outputs if output is not None] == [[0], [2]]
        assert ru.delivered == 2
