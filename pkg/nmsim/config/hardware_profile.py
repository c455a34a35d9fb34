"""
硬件/数值/资源配置文件加载模块
负责从YAML文件加载硬件参数、数值精度配置与资源构成模型
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

from ..exceptions.custom_exceptions import ConfigurationException
from ..models.numeric_models import NumericProfile
from ..models.stats_models import ResourceModel
from .settings import HwConfig

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# 随包发布的数据文件目录
DATA_DIR = Path(__file__).resolve().parent
DEFAULT_HW_FILE = DATA_DIR / "hardware.yaml"
DEFAULT_RESOURCE_FILE = DATA_DIR / "resource-model.yaml"
NUMERIC_PRESETS = {
    "int8": DATA_DIR / "numeric-int8.yaml",
    "wide": DATA_DIR / "numeric-wide.yaml",
}
SSD_MODEL_FILE = DATA_DIR / "models" / "ssd-mobilenet-v1-300.json"


def _load_yaml(path: PathLike, section: str) -> Dict[str, Any]:
    """
    读取YAML文件并返回指定段落

    Args:
        path: 文件路径
        section: 顶层键名

    Returns:
        段落内容字典

    Raises:
        ConfigurationException: 文件不存在、解析失败或缺少段落
    """
    try:
        if not os.path.exists(path):
            raise ConfigurationException(f"Configuration file not found: {path}")

        with open(path, 'r', encoding='utf-8') as file:
            config_data = yaml.safe_load(file)

        if not isinstance(config_data, dict) or section not in config_data:
            raise ConfigurationException(f"Invalid configuration file format: missing '{section}' in {path}")

        return config_data[section] or {}

    except yaml.YAMLError as e:
        raise ConfigurationException(f"Failed to parse configuration file {path}: {str(e)}", cause=e)
    except Exception as e:
        if isinstance(e, ConfigurationException):
            raise
        raise ConfigurationException(f"Failed to load configuration file {path}: {str(e)}", cause=e)


def load_hw_config(path: Optional[PathLike] = None) -> HwConfig:
    """
    加载硬件参数配置

    Args:
        path: YAML文件路径，None时使用内置参考配置

    Returns:
        HwConfig实例

    Raises:
        ConfigurationException: 文件无效或参数不满足约束
    """
    path = path or DEFAULT_HW_FILE
    data = _load_yaml(path, 'hardware')
    try:
        config = HwConfig(**data)
    except Exception as e:
        raise ConfigurationException(f"Invalid hardware configuration in {path}: {str(e)}", cause=e)
    logger.info(f"Loaded hardware configuration from {path}: m={config.m}, r={config.r}")
    return config


def load_numeric_profile(path_or_name: Optional[PathLike] = None) -> NumericProfile:
    """
    加载数值精度配置

    Args:
        path_or_name: YAML文件路径，或预置名称 "int8" / "wide"；None为int8

    Returns:
        NumericProfile实例

    Raises:
        ConfigurationException: 文件无效
    """
    key = str(path_or_name) if path_or_name is not None else "int8"
    path = NUMERIC_PRESETS.get(key, path_or_name)
    data = _load_yaml(path, 'numeric')
    try:
        profile = NumericProfile(**data)
    except Exception as e:
        raise ConfigurationException(f"Invalid numeric profile in {path}: {str(e)}", cause=e)
    logger.info(f"Loaded numeric profile '{profile.name}' from {path}")
    return profile


def load_resource_model(path: Optional[PathLike] = None) -> ResourceModel:
    """
    加载资源构成模型

    Args:
        path: YAML文件路径，None时使用内置资源数据

    Returns:
        ResourceModel实例

    Raises:
        ConfigurationException: 文件无效或违反 multiplier_cost ≤ SNU ≤ 总量
    """
    path = path or DEFAULT_RESOURCE_FILE
    data = _load_yaml(path, 'resources')
    try:
        model = ResourceModel(**data)
    except Exception as e:
        raise ConfigurationException(f"Invalid resource model in {path}: {str(e)}", cause=e)
    logger.debug(f"Loaded resource model from {path}: total={model.total} {model.unit}")
    return model


def dump_numeric_profile(profile: NumericProfile) -> str:
    """将数值精度配置序列化为YAML文本（用于复现包）"""
    return yaml.safe_dump({'numeric': profile.model_dump()}, sort_keys=True)
