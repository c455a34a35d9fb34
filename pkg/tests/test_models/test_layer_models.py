"""
层与模型数据模型测试用例
"""

import pytest
from pydantic import ValidationError

from nmsim.models.layer_models import Activation, CnnModel, Diagnostic, LayerKind, LayerSpec


def _spec(**overrides):
    values = dict(index=1, kind=LayerKind.STD3X3, w_in=8, h_in=6, w_out=8, h_out=6, c_in=4, f_out=10, k=3)
    values.update(overrides)
    return LayerSpec(**values)


class TestLayerKind:
    """层类型测试"""

    def test_codes_and_labels(self):
        """测试二进制编码与类型标签"""
        assert LayerKind.STD3X3.code == 0
        assert LayerKind.DW3X3.code == 1
        assert LayerKind.CONV1X1.table_label == "1x1"
        assert LayerKind.from_code(1) == LayerKind.DW3X3

    def test_unknown_code(self):
        """测试未知编码"""
        with pytest.raises(ValueError):
            LayerKind.from_code(7)

    def test_activation_codes(self):
        """测试激活函数编码"""
        assert Activation.from_code(2) == Activation.RELU6
        assert Activation.NONE.code == 0


class TestLayerSpec:
    """层描述测试"""

    def test_standard_layer_properties(self):
        """测试标准卷积层的派生属性"""
        layer = _spec()
        assert layer.out_maps == 10
        assert layer.fan_in == 36
        assert layer.weight_shape == (10, 4, 3, 3)
        assert layer.positions == 48
        assert layer.half == 1
        assert not layer.is_depthwise

    def test_depthwise_layer_properties(self):
        """测试DW层按输入通道产生输出"""
        layer = _spec(kind=LayerKind.DW3X3, f_out=1)
        assert layer.out_maps == 4
        assert layer.fan_in == 9
        assert layer.weight_shape == (4, 1, 3, 3)

    def test_even_filter_rejected(self):
        """测试偶数滤波器尺寸"""
        with pytest.raises(ValidationError):
            _spec(k=2)

    def test_invalid_stride(self):
        """测试步长只能为1或2"""
        with pytest.raises(ValidationError):
            _spec(stride=3)

    def test_unknown_field_rejected(self):
        """测试未知字段"""
        with pytest.raises(ValidationError):
            _spec(padding=1)

    def test_source_index(self):
        """测试输入来源"""
        assert _spec(index=3).source_index == 2
        assert _spec(index=3, source=0).source_index == 0

    @pytest.mark.parametrize('size, stride, expected', [(300, 2, 150), (19, 2, 10), (1, 2, 1), (38, 1, 38)])
    def test_expected_out_size(self, size, stride, expected):
        """测试same填充输出尺寸"""
        layer = _spec(w_in=size, h_in=size, w_out=1, h_out=1, stride=stride)
        assert layer.expected_out_size() == (expected, expected)


class TestCnnModel:
    """模型测试"""

    def test_indices_must_be_sequential(self, layer_factory):
        """测试层编号必须从1连续"""
        with pytest.raises(ValidationError):
            CnnModel(layers=[layer_factory(2, LayerKind.STD3X3, 4, 4, 1, 1)])

    def test_empty_model_rejected(self):
        """测试空模型"""
        with pytest.raises(ValidationError):
            CnnModel(layers=[])

    def test_shapes(self, chain_model):
        """测试输入与各层输出形状"""
        assert chain_model.input_shape == (3, 9, 7)
        assert chain_model.output_shape(0) == (3, 9, 7)
        assert chain_model.output_shape(1) == (8, 5, 4)
        assert chain_model.output_shape(3) == (30, 5, 4)
        assert len(chain_model) == 4

    def test_layer_lookup_out_of_range(self, chain_model):
        """测试不存在的层编号"""
        with pytest.raises(IndexError):
            chain_model.layer(5)

    def test_last_use(self, chain_model):
        """测试特征图最后使用层：检测头延长了第2层的生命周期"""
        assert chain_model.last_use() == {0: 1, 1: 2, 2: 4}


class TestDiagnostic:
    """诊断信息测试"""

    def test_str_with_layer(self):
        diagnostic = Diagnostic(layer_index=3, code='shape_rule', message='bad')
        assert str(diagnostic) == "layer 3: [shape_rule] bad"

    def test_str_without_layer(self):
        diagnostic = Diagnostic(code='x', message='y')
        assert str(diagnostic) == "model: [x] y"
