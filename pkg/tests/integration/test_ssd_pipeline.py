"""
SSD/MobileNet完整流程集成测试
"""

from pathlib import Path

import numpy as np
import pytest

from nmsim.cli.fuzz import run_fuzz
from nmsim.config.hardware_profile import load_resource_model
from nmsim.config.settings import HwConfig
from nmsim.control.executor import execute
from nmsim.control.sot_compiler import compile_sot, predict_program
from nmsim.metrics.utilization import build_report
from nmsim.models.numeric_models import NumericProfile
from nmsim.models.tensor_models import FeatureMapTensor, WeightStore


@pytest.fixture(scope="module")
def ssd_run(ssd_model):
    """宽位配置下执行一次完整SSD模型"""
    hw = HwConfig()
    profile = NumericProfile.wide()
    weights = WeightStore.random(ssd_model, profile, seed=0)
    c, w, h = ssd_model.input_shape
    image = FeatureMapTensor(np.random.default_rng(0).integers(0, 255, size=(c, h, w), endpoint=True))
    program = compile_sot(ssd_model, hw)
    _, stats = execute(program, weights, image, hw, profile, mode='burst')
    return program, stats, hw


@pytest.mark.integration
@pytest.mark.slow
class TestSsdUtilization:
    """完整SSD模型的执行与利用率"""

    def test_cycles_match_prediction(self, ssd_run):
        program, stats, hw = ssd_run
        assert {layer.layer_index: layer.cycles_b for layer in stats.layers} == predict_program(program, hw)
        assert stats.total_cycles == pytest.approx(4_958_821, rel=0.01)

    def test_utilization(self, ssd_run):
        """测试R_u在0.967到0.977之间，R_c约0.559"""
        _, stats, hw = ssd_run
        report = build_report(stats, load_resource_model(), hw)
        assert 0.967 <= report.r_u <= 0.977
        assert report.r_c == pytest.approx(0.559, abs=1e-3)
        assert 40.0 <= report.fps <= 40.7

    def test_overhead_ordering(self, ssd_run):
        """测试开销排序：内部碎片 > 填充 > 外部碎片"""
        _, stats, _ = ssd_run
        overhead = stats.overhead
        assert overhead.internal_fragmentation > overhead.padding > overhead.external_fragmentation

    def test_partition(self, ssd_run):
        _, stats, _ = ssd_run
        assert all(layer.accounted == layer.peak_muls_c for layer in stats.layers)
        assert stats.total_effective <= stats.total_macs


@pytest.mark.integration
@pytest.mark.slow
def test_fuzz_campaign(hw, temp_directory):
    """默认种子的100个随机用例逐周期执行全部通过"""
    assert run_fuzz(0, 100, hw, out_dir=Path(temp_directory), mode='cycle') == 100
