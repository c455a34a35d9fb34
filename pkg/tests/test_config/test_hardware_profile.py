"""
配置文件加载测试用例
"""

import os

import pytest
import yaml

from nmsim.config.hardware_profile import (
    dump_numeric_profile,
    load_hw_config,
    load_numeric_profile,
    load_resource_model
)
from nmsim.exceptions.custom_exceptions import ConfigurationException
from nmsim.models.numeric_models import NumericProfile, RequantParams


def _write_yaml(directory, name, data):
    path = os.path.join(directory, name)
    with open(path, 'w', encoding='utf-8') as f:
        yaml.safe_dump(data, f)
    return path


class TestLoadHwConfig:
    """硬件参数文件测试"""

    def test_default_file(self):
        """测试内置参考配置"""
        config = load_hw_config()
        assert config.m == 256
        assert config.shape_for(1).q == 16
        assert config.pipeline_overhead_const == 57

    def test_custom_file(self, temp_directory):
        """测试自定义配置文件"""
        path = _write_yaml(temp_directory, 'hw.yaml', {'hardware': {'m': 512, 'clock_hz': 100000000}})
        config = load_hw_config(path)
        assert config.m == 512
        assert config.clock_hz == 100000000

    def test_missing_file(self, temp_directory):
        """测试文件不存在"""
        with pytest.raises(ConfigurationException):
            load_hw_config(os.path.join(temp_directory, 'missing.yaml'))

    def test_missing_section(self, temp_directory):
        """测试缺少hardware段"""
        path = _write_yaml(temp_directory, 'hw.yaml', {'other': {}})
        with pytest.raises(ConfigurationException):
            load_hw_config(path)

    def test_invalid_partition(self, temp_directory):
        """测试违反乘法器池约束的配置"""
        path = _write_yaml(temp_directory, 'hw.yaml', {'hardware': {'config_table': {3: {'p': 1, 'q': 29}}}})
        with pytest.raises(ConfigurationException):
            load_hw_config(path)

    def test_malformed_yaml(self, temp_directory):
        """测试YAML语法错误"""
        path = os.path.join(temp_directory, 'bad.yaml')
        with open(path, 'w', encoding='utf-8') as f:
            f.write("hardware: [unclosed\n")
        with pytest.raises(ConfigurationException):
            load_hw_config(path)


class TestNumericProfiles:
    """数值精度配置文件测试"""

    def test_default_is_int8(self):
        """测试默认int8配置"""
        assert load_numeric_profile() == NumericProfile.int8()

    def test_wide_preset(self):
        """测试wide预置配置"""
        profile = load_numeric_profile('wide')
        assert profile.accumulator_bits == 64
        assert profile.activation_bits == 32
        assert profile.requantize is False

    def test_dump_and_reload(self, temp_directory):
        """测试复现包中的配置可重新加载"""
        profile = NumericProfile(layers={2: RequantParams(multiplier=3, shift=10)})
        path = os.path.join(temp_directory, 'profile.yaml')
        with open(path, 'w', encoding='utf-8') as f:
            f.write(dump_numeric_profile(profile))
        assert load_numeric_profile(path) == profile


class TestResourceModel:
    """资源构成模型测试"""

    def test_reference_costs(self):
        """测试内置资源数据"""
        model = load_resource_model()
        assert model.total == 84296
        assert model.multiplier_cost == 47104
        assert model.unit_costs['SNU'] == 50432

    def test_multiplier_cost_above_snu(self, temp_directory):
        """测试乘法器资源超过SNU"""
        path = _write_yaml(temp_directory, 'rm.yaml', {
            'resources': {'unit_costs': {'SNU': 10, 'DU': 5}, 'multiplier_cost': 11}
        })
        with pytest.raises(ConfigurationException):
            load_resource_model(path)
