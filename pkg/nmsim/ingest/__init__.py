"""
Ingestion module
Model documents, weight blobs and input images
"""

from .model_loader import (
    dump_model,
    load_model,
    load_model_file,
    numeric_diagnostics,
    shape_diagnostics,
    validate_model
)
from .weight_codec import expected_size, load_weights, save_weights
from .image_loader import load_image, save_image

__all__ = [
    'dump_model',
    'load_model',
    'load_model_file',
    'numeric_diagnostics',
    'shape_diagnostics',
    'validate_model',
    'expected_size',
    'load_weights',
    'save_weights',
    'load_image',
    'save_image'
]
