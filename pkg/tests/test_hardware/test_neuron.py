"""
硬件神经元测试用例
"""

import numpy as np
import pytest

from nmsim.config.settings import HwConfig
from nmsim.exceptions.custom_exceptions import AccumulatorOverflowException, ConfigurationException
from nmsim.hardware.neuron import HardwareNeuron, configure_hn, slot_tally
from nmsim.models.layer_models import LayerKind
from nmsim.models.numeric_models import NumericProfile


class TestConfigureHn:
    """乘法器池重配置测试"""

    def test_three_by_three(self, hw):
        """测试k=3：28棵9叶加法树，4个乘法器空闲"""
        config = configure_hn(hw, 3)
        assert config.multipliers_used == 252
        assert config.idle_multipliers == 4
        assert config.adder_tree_shape == (28, 9)

    def test_one_by_one(self, hw):
        """测试k=1：16棵16叶加法树，没有空闲乘法器"""
        config = configure_hn(hw, 1)
        assert config.multipliers_used == 256
        assert config.idle_multipliers == 0

    def test_q_override_exceeds_pool(self, hw):
        """测试Q覆盖值超出乘法器池"""
        with pytest.raises(ConfigurationException):
            configure_hn(hw, 3, q=29)

    def test_missing_k(self, hw):
        """测试配置表中没有的k"""
        with pytest.raises(ConfigurationException, match="no hardware configuration for k=5"):
            configure_hn(hw, 5)

    def test_custom_table(self):
        """测试自定义配置表"""
        hw = HwConfig(config_table={5: {'p': 1, 'q': 10}})
        assert configure_hn(hw, 5).idle_multipliers == 6


class TestSlotTally:
    """乘法器周期划分测试"""

    def test_depthwise_partial_pass(self, hw):
        """测试只分配5个HN的DW pass"""
        config = configure_hn(hw, 3)
        tally = slot_tally(config, assigned=5, lanes=1, valid_taps=30, cycles=20)
        assert tally.padding == 750
        assert tally.internal_fragmentation == 4140
        assert tally.external_fragmentation == 80
        assert tally.total + 5 * 30 == 20 * 256

    def test_idle_input_lanes(self, hw):
        """测试1x1层C=8时一半读口空闲计为内部碎片"""
        config = configure_hn(hw, 1)
        tally = slot_tally(config, assigned=16, lanes=8, valid_taps=10, cycles=10)
        assert tally.padding == 0
        assert tally.internal_fragmentation == 1280
        assert tally.external_fragmentation == 0


class TestHardwareNeuron:
    """硬件神经元测试"""

    @pytest.fixture
    def neuron(self, hw, wide_profile):
        neuron = HardwareNeuron(index=0, config=configure_hn(hw, 3), profile=wide_profile)
        weight_mem = np.stack([np.arange(9), np.ones(9, dtype=np.int64)], axis=1)
        neuron.load_layer(weight_mem, np.array([5]), passes_c=2, positions=1)
        return neuron

    def test_accumulates_over_input_passes(self, neuron):
        """测试跨输入pass累加，最后一个pass才输出"""
        products, tree_sum, netsum = neuron.step(np.ones(9, dtype=np.int64), pos=0)
        assert products.tolist() == list(range(9))
        assert tree_sum == 36
        assert netsum is None
        assert neuron.state.weight_addr == 1

        _, tree_sum, netsum = neuron.step(np.full(9, 2), pos=0)
        assert tree_sum == 18
        assert netsum == 54

    def test_snu_uses_current_weight_address(self, neuron):
        """测试SNU取当前权重地址那一列"""
        assert neuron.snu_step(np.full(9, 3)).tolist() == [3 * i for i in range(9)]
        neuron.state.weight_addr = 1
        assert neuron.snu_step(np.full(9, 3)).tolist() == [3] * 9

    def test_du_first_pass_overwrites_netsum(self, neuron):
        """测试DU在第一个输入pass覆盖Netsum，最后一个pass输出"""
        assert neuron.du_step(np.array([4, 5]), pass_index=0, pos=0) is None
        assert neuron.state.netsum_mem[0] == 9
        assert neuron.du_step(np.array([1]), pass_index=1, pos=0) == 10

        assert neuron.du_step(np.array([2]), pass_index=0, pos=0) is None
        assert neuron.state.netsum_mem[0] == 2

    def test_su_applies_bias(self, neuron, layer_factory):
        """测试SU加偏置"""
        layer = layer_factory(1, LayerKind.STD3X3, 1, 1, 2, 1)
        assert neuron.su_step(54, layer, f=0) == 59

    def test_pooling_hook(self, neuron, layer_factory):
        """测试池化钩子"""
        neuron.pooling = lambda value: value * 0
        layer = layer_factory(1, LayerKind.STD3X3, 1, 1, 2, 1)
        assert neuron.su_step(54, layer, f=0) == 0

    def test_overflow(self, hw):
        """测试累加器溢出"""
        profile = NumericProfile(accumulator_bits=16)
        neuron = HardwareNeuron(index=3, config=configure_hn(hw, 3), profile=profile)
        neuron.load_layer(np.full((9, 1), 127), np.zeros(1), passes_c=1, positions=1)
        with pytest.raises(AccumulatorOverflowException):
            neuron.step(np.full(9, 127), pos=0)
