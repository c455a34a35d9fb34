"""
SOT执行器测试用例
"""

import numpy as np
import pytest

from nmsim.control.executor import SotExecutor, execute
from nmsim.control.sot_compiler import compile_sot, predict_program
from nmsim.exceptions.custom_exceptions import ConfigurationException, ShapeException
from nmsim.models.layer_models import CnnModel, LayerKind
from nmsim.models.tensor_models import FeatureMapTensor, LayerWeights, WeightStore
from nmsim.oracle.reference import count_mul_eq2, infer_ref


@pytest.fixture
def chain_program(chain_model, hw):
    return compile_sot(chain_model, hw)


class TestExecutionModes:
    """执行方式测试"""

    def test_unknown_mode(self, hw, int8_profile):
        """测试未知的执行方式"""
        with pytest.raises(ConfigurationException):
            SotExecutor(hw, int8_profile, mode='fast')
        with pytest.raises(ConfigurationException):
            SotExecutor(hw, int8_profile, layer_modes={2: 'fast'})

    def test_auto_threshold(self, chain_program, hw, int8_profile):
        """测试auto模式按HN步数选择"""
        row = chain_program.row(4)
        assert SotExecutor(hw, int8_profile, cycle_mode_limit=row.compute_cycles * row.q)._mode_for(row) == 'cycle'
        assert SotExecutor(hw, int8_profile, cycle_mode_limit=0)._mode_for(row) == 'burst'

    def test_auto_limit_from_config(self, hw, int8_profile, monkeypatch):
        """测试auto阈值默认取全局配置"""
        monkeypatch.setenv('NM_SIM_CYCLE_MODE_LIMIT', '5')
        assert SotExecutor(hw, int8_profile).cycle_mode_limit == 5

    def test_cycle_and_burst_agree(self, chain_program, chain_weights, chain_image, hw, int8_profile):
        """测试逐周期与向量化执行的输出和统计完全相同"""
        cycle_outputs, cycle_stats = SotExecutor(hw, int8_profile, mode='cycle').run(
            chain_program, chain_weights, chain_image)
        burst_outputs, burst_stats = SotExecutor(hw, int8_profile, mode='burst').run(
            chain_program, chain_weights, chain_image)
        assert cycle_outputs == burst_outputs
        assert cycle_stats == burst_stats


class TestBitExactness:
    """与参考实现逐位一致"""

    @pytest.mark.parametrize('mode', ['cycle', 'burst'])
    def test_int8(self, chain_model, chain_program, chain_weights, chain_image, hw, int8_profile, mode):
        outputs, _ = execute(chain_program, chain_weights, chain_image, hw, int8_profile, mode=mode)
        expected, _ = infer_ref(chain_model, chain_weights, chain_image, int8_profile)
        assert outputs == expected

    @pytest.mark.parametrize('mode', ['cycle', 'burst'])
    def test_wide(self, chain_model, chain_program, hw, wide_profile, image_factory, mode):
        weights = WeightStore.random(chain_model, wide_profile, seed=1)
        image = image_factory(chain_model, wide_profile, seed=5)
        outputs, _ = execute(chain_program, weights, image, hw, wide_profile, mode=mode)
        expected, _ = infer_ref(chain_model, weights, image, wide_profile)
        assert outputs == expected


class TestCycleStats:
    """周期统计测试"""

    def test_tiny_padding_example(self, tiny_model, hw, wide_profile):
        """测试2x2输入的3x3卷积：36次乘法中16次有效"""
        weights = WeightStore(layers={1: LayerWeights(weights=np.ones((1, 1, 3, 3)), bias=np.zeros(1))})
        image = FeatureMapTensor(np.array([[[1, 2], [3, 4]]]))
        outputs, stats = execute(compile_sot(tiny_model, hw), weights, image, hw, wide_profile, mode='cycle')
        layer = stats.layers[0]
        assert layer.effective_muls_a == 16
        assert layer.total_macs == 36
        assert outputs[0].data.ravel().tolist() == [10, 10, 10, 10]

    def test_cycles_match_prediction(self, chain_program, chain_weights, chain_image, hw, int8_profile):
        """测试实测周期数等于闭式预测"""
        _, stats = execute(chain_program, chain_weights, chain_image, hw, int8_profile)
        assert {layer.layer_index: layer.cycles_b for layer in stats.layers} == predict_program(chain_program, hw)
        assert stats.total_cycles == 528

    def test_partition_closes(self, chain_model, chain_program, chain_weights, chain_image, hw, int8_profile):
        """测试有效乘法与各项开销之和等于峰值"""
        _, stats = execute(chain_program, chain_weights, chain_image, hw, int8_profile, mode='burst')
        for layer in stats.layers:
            assert layer.accounted == layer.peak_muls_c == layer.cycles_b * hw.m
            assert layer.effective_muls_a <= layer.total_macs
            assert layer.overhead.pipeline_overhead == (layer.cycles_b - layer.compute_cycles) * hw.m
        assert stats.total_macs == sum(count_mul_eq2(layer) for layer in chain_model.layers)

    def test_one_by_one_has_no_padding(self, chain_program, chain_weights, chain_image, hw, int8_profile):
        """测试1x1层没有填充开销，空闲读口计入内部碎片"""
        _, stats = execute(chain_program, chain_weights, chain_image, hw, int8_profile)
        layer = stats.layers[2]
        assert layer.effective_muls_a == 30 * 8 * 20
        assert layer.overhead.padding == 0
        assert layer.overhead.internal_fragmentation > 0

    def test_stop_after(self, chain_program, chain_weights, chain_image, hw, int8_profile):
        """测试执行到指定层后停止"""
        outputs, stats = SotExecutor(hw, int8_profile).run(chain_program, chain_weights, chain_image, stop_after=2)
        assert len(outputs) == len(stats.layers) == 2


class TestExecutorErrors:
    """输入校验测试"""

    def test_image_shape(self, chain_program, chain_weights, hw, int8_profile):
        """测试图像形状与第1层不符"""
        with pytest.raises(ShapeException):
            execute(chain_program, chain_weights, FeatureMapTensor.zeros(3, 8, 7), hw, int8_profile)

    def test_weight_shape(self, chain_program, chain_weights, chain_image, hw, int8_profile):
        """测试权重形状与层不符"""
        layers = dict(chain_weights.layers)
        layers[2] = LayerWeights(weights=np.zeros((8, 2, 3, 3)), bias=np.zeros(8))
        with pytest.raises(ShapeException):
            execute(chain_program, WeightStore(layers=layers), chain_image, hw, int8_profile)


class TestObserver:
    """逐周期回调测试"""

    def test_events_per_cycle(self, tiny_model, hw, wide_profile, image_factory):
        events = []
        image = image_factory(tiny_model, wide_profile)
        weights = WeightStore.random(tiny_model, wide_profile)
        SotExecutor(hw, wide_profile, mode='cycle', observer=events.append).run(
            compile_sot(tiny_model, hw), weights, image)
        assert len(events) == 4 * 28
        outputs = [event.output for event in events if event.hn == 0]
        assert all(output is not None for output in outputs)
        assert all(event.output is None for event in events if event.hn == 1)


class TestSlotEnumeration:
    """逐个乘法器周期枚举核对开销划分"""

    def test_partial_filter_pass(self, layer_factory, hw, wide_profile, image_factory):
        """测试F=29、Q=28：第二个pass只有1个HN有输出图"""
        model = CnnModel(name="f29", layers=[layer_factory(1, LayerKind.STD3X3, 6, 5, 1, 29)])
        weights = WeightStore.random(model, wide_profile, seed=2)
        _, stats = execute(compile_sot(model, hw), weights, image_factory(model, wide_profile), hw,
                           wide_profile, mode='cycle')

        q, kk, w, h, f_out = 28, 9, 6, 5, 29
        tally = {'effective': 0, 'padding': 0, 'internal': 0, 'external': 0}
        for pf in range(2):
            for y in range(h):
                for x in range(w):
                    tally['external'] += hw.m - q * kk
                    for n in range(q):
                        for dy in (-1, 0, 1):
                            for dx in (-1, 0, 1):
                                if pf * q + n >= f_out:
                                    tally['internal'] += 1
                                elif 0 <= x + dx < w and 0 <= y + dy < h:
                                    tally['effective'] += 1
                                else:
                                    tally['padding'] += 1

        layer = stats.layers[0]
        assert tally['internal'] == 27 * 9 * 30
        assert tally['external'] == 4 * 2 * 30
        assert layer.effective_muls_a == tally['effective']
        assert layer.overhead.padding == tally['padding']
        assert layer.overhead.internal_fragmentation == tally['internal']
        assert layer.overhead.external_fragmentation == tally['external']
        assert layer.compute_cycles == 2 * 30


class TestDeterminism:
    """执行顺序与状态复用测试"""

    def test_repeated_runs_do_not_leak_state(self, chain_program, chain_weights, chain_model, hw,
                                             int8_profile, image_factory):
        """测试同一执行器先后处理A、B、A，结果与各自新建执行器相同"""
        first = image_factory(chain_model, int8_profile, seed=11)
        second = image_factory(chain_model, int8_profile, seed=12)
        executor = SotExecutor(hw, int8_profile, mode='cycle')
        runs = [executor.run(chain_program, chain_weights, image) for image in (first, second, first)]

        for image, (outputs, stats) in zip((first, second, first), runs):
            fresh_outputs, fresh_stats = SotExecutor(hw, int8_profile, mode='cycle').run(
                chain_program, chain_weights, image)
            assert outputs == fresh_outputs
            assert stats == fresh_stats
        assert runs[0][0] == runs[2][0]
        assert runs[0][0] != runs[1][0]

    def test_shuffled_hn_order(self, chain_program, chain_weights, chain_image, hw, int8_profile):
        """测试每周期打乱HN驱动顺序不改变输出与统计"""
        events = []
        shuffled = SotExecutor(hw, int8_profile, mode='cycle', hn_shuffle_seed=3, observer=events.append)
        outputs, stats = shuffled.run(chain_program, chain_weights, chain_image)
        expected_outputs, expected_stats = SotExecutor(hw, int8_profile, mode='cycle').run(
            chain_program, chain_weights, chain_image)
        assert outputs == expected_outputs
        assert stats == expected_stats

        first_cycle = [event.hn for event in events if event.layer_index == 1 and event.cycle == 0]
        assert sorted(first_cycle) == list(range(28))
        assert first_cycle != list(range(28))


class TestPortActivity:
    """MAU读口与RU送数统计"""

    def test_reads_and_deliveries(self, chain_program, chain_weights, chain_image, hw, int8_profile):
        """测试步长1时每周期读P个字、送k·k·P个值；步长2时读数按输入像素计"""
        executor = SotExecutor(hw, int8_profile, mode='cycle')
        _, stats = executor.run(chain_program, chain_weights, chain_image)

        for layer in stats.layers:
            row = chain_program.row(layer.layer_index)
            activity = executor.port_activity[row.layer_index]
            assert activity.delivered == row.k * row.k * row.lanes * layer.compute_cycles
            if row.stride == 1:
                assert activity.reads == row.lanes * layer.compute_cycles
            else:
                assert activity.reads == row.lanes * row.passes_c * row.passes_f * row.w_in * row.h_in

    def test_burst_records_nothing(self, chain_program, chain_weights, chain_image, hw, int8_profile):
        executor = SotExecutor(hw, int8_profile, mode='burst')
        executor.run(chain_program, chain_weights, chain_image)
        assert executor.port_activity == {}


class TestBiasFlag:
    """偏置开关测试"""

    @pytest.mark.parametrize('mode', ['cycle', 'burst'])
    def test_disabled_bias_is_ignored(self, layer_factory, hw, wide_profile, image_factory, mode):
        """测试has_bias为假时权重文件中的偏置不参与计算"""
        model = CnnModel(name="nobias", layers=[layer_factory(1, LayerKind.STD3X3, 4, 3, 2, 3, has_bias=False)])
        weights = np.random.default_rng(4).integers(-128, 127, size=(3, 2, 3, 3), endpoint=True)
        store = WeightStore(layers={1: LayerWeights(weights=weights, bias=np.array([100, -50, 7]))})
        zeroed = WeightStore(layers={1: LayerWeights(weights=weights, bias=np.zeros(3))})
        image = image_factory(model, wide_profile, seed=6)

        outputs, _ = execute(compile_sot(model, hw), store, image, hw, wide_profile, mode=mode)
        expected, _ = infer_ref(model, store, image, wide_profile)
        unbiased, _ = infer_ref(model, zeroed, image, wide_profile)
        assert outputs == expected == unbiased
