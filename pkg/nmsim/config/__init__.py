"""
Configuration module
Hardware, logging and simulator settings plus shipped YAML/JSON profiles
"""

from .settings import HnShape, HwConfig, LoggingConfig, SimulatorConfig, get_config, reload_config
from .hardware_profile import (
    DEFAULT_HW_FILE,
    DEFAULT_RESOURCE_FILE,
    NUMERIC_PRESETS,
    SSD_MODEL_FILE,
    dump_numeric_profile,
    load_hw_config,
    load_numeric_profile,
    load_resource_model
)

__all__ = [
    'HnShape',
    'HwConfig',
    'LoggingConfig',
    'SimulatorConfig',
    'get_config',
    'reload_config',
    'DEFAULT_HW_FILE',
    'DEFAULT_RESOURCE_FILE',
    'NUMERIC_PRESETS',
    'SSD_MODEL_FILE',
    'dump_numeric_profile',
    'load_hw_config',
    'load_numeric_profile',
    'load_resource_model'
]
