"""
Data models module
Layer/model descriptions, numeric profiles, tensors, SOT rows and statistics
"""

from .layer_models import Activation, CnnModel, Diagnostic, LayerKind, LayerSpec
from .numeric_models import NumericProfile, RequantParams
from .sot_models import SOT_FIELDS, SotProgram, SotRow
from .stats_models import (
    OVERHEAD_CATEGORIES,
    CycleStats,
    LayerReport,
    LayerStats,
    MacCount,
    OverheadBreakdown,
    ResourceModel,
    UtilizationReport
)
from .tensor_models import FeatureMapTensor, LayerWeights, WeightStore

__all__ = [
    'Activation',
    'CnnModel',
    'Diagnostic',
    'LayerKind',
    'LayerSpec',
    'NumericProfile',
    'RequantParams',
    'SOT_FIELDS',
    'SotProgram',
    'SotRow',
    'OVERHEAD_CATEGORIES',
    'CycleStats',
    'LayerReport',
    'LayerStats',
    'MacCount',
    'OverheadBreakdown',
    'ResourceModel',
    'UtilizationReport',
    'FeatureMapTensor',
    'LayerWeights',
    'WeightStore'
]
