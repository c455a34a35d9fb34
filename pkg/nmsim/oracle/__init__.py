"""
Oracle module
Direct reference convolution and multiplication counting
"""

from .reference import conv_layer_ref, count_mul_eq2, infer_ref

__all__ = [
    'conv_layer_ref',
    'count_mul_eq2',
    'infer_ref'
]
