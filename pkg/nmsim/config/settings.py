"""
应用配置管理模块
使用Pydantic Settings管理硬件参数、日志与模拟器运行配置
"""

from typing import Dict, Optional

from pydantic import BaseModel, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class HnShape(BaseModel):
    """某一滤波器尺寸k下的HN划分 (P, Q)"""
    p: int = Field(..., ge=1, description="每周期并行处理的输入特征图数P")
    q: int = Field(..., ge=1, description="并行HN数量Q")


def _reference_config_table() -> Dict[int, HnShape]:
    return {3: HnShape(p=1, q=28), 1: HnShape(p=16, q=16)}


class HwConfig(BaseSettings):
    """全局硬件参数配置"""
    model_config = SettingsConfigDict(
        env_prefix="NM_HW_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )

    m: int = Field(default=256, description="乘法器/加法器池大小")
    r: int = Field(default=32, description="MAU双口存储体数量")
    clock_hz: int = Field(default=200_000_000, description="时钟频率")
    config_table: Dict[int, HnShape] = Field(default_factory=_reference_config_table)
    # 标定常数：由参考逐层周期数拟合
    pipeline_overhead_const: int = Field(default=57, description="每层流水线开销D")
    bank_depth: int = Field(default=131072, description="每个存储体的字数")

    @field_validator('m', 'r', 'clock_hz', 'bank_depth')
    @classmethod
    def validate_positive(cls, v):
        if v <= 0:
            raise ValueError("Hardware sizes must be positive")
        return v

    @field_validator('pipeline_overhead_const')
    @classmethod
    def validate_overhead(cls, v):
        if v < 0:
            raise ValueError("Pipeline overhead constant cannot be negative")
        return v

    @model_validator(mode='after')
    def validate_config_table(self) -> 'HwConfig':
        for k, shape in self.config_table.items():
            if k < 1 or k % 2 == 0:
                raise ValueError(f"Filter size must be odd and positive, got k={k}")
            used = shape.q * k * k * shape.p
            if used > self.m:
                raise ValueError(
                    f"k={k}: q*k*k*p = {used} exceeds the multiplier pool m={self.m}"
                )
            if shape.q > self.r:
                raise ValueError(f"k={k}: q={shape.q} exceeds the bank count r={self.r}")
        return self

    def shape_for(self, k: int) -> Optional[HnShape]:
        """获取k对应的(P, Q)配置，不存在时返回None"""
        return self.config_table.get(k)


class LoggingConfig(BaseSettings):
    """日志配置"""
    model_config = SettingsConfigDict(env_prefix="NM_LOG_", case_sensitive=False, extra="ignore")

    level: str = Field(default="INFO")
    format: str = Field(default="%(asctime)s [%(levelname)s] %(name)s: %(message)s")
    file_path: Optional[str] = Field(default=None)

    @field_validator('level')
    @classmethod
    def validate_level(cls, v):
        valid_levels = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
        if v.upper() not in valid_levels:
            raise ValueError(f"Invalid log level: {v}. Must be one of {valid_levels}")
        return v.upper()


class SimulatorConfig(BaseSettings):
    """模拟器主配置类"""

    model_config = SettingsConfigDict(
        env_prefix="NM_SIM_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        env_nested_delimiter='__',
        extra="ignore"
    )

    hw: HwConfig = Field(default_factory=HwConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    app_name: str = "nmsim"
    app_version: str = "1.0.0"

    # 批量模拟并行度，0表示串行
    threads: int = 0
    # auto模式下逐周期模拟的层规模上限（HN步数）
    cycle_mode_limit: int = 20000

    @field_validator('threads')
    @classmethod
    def validate_threads(cls, v):
        if v < 0:
            raise ValueError("Thread count cannot be negative")
        return v

    @field_validator('cycle_mode_limit')
    @classmethod
    def validate_cycle_mode_limit(cls, v):
        if v < 0:
            raise ValueError("Cycle mode limit cannot be negative")
        return v

    def get_log_level(self) -> str:
        """获取日志级别"""
        return self.logging.level.upper()

    @classmethod
    def create_from_env(cls) -> 'SimulatorConfig':
        """从环境变量创建配置实例"""
        try:
            return cls()
        except Exception as e:
            from ..exceptions.custom_exceptions import ConfigurationException
            raise ConfigurationException(f"Failed to create configuration: {str(e)}", cause=e)


# 全局配置实例
_config_instance: Optional[SimulatorConfig] = None


def get_config() -> SimulatorConfig:
    """获取全局配置实例"""
    global _config_instance
    if _config_instance is None:
        _config_instance = SimulatorConfig.create_from_env()
    return _config_instance


def reload_config() -> SimulatorConfig:
    """重新加载配置"""
    global _config_instance
    _config_instance = SimulatorConfig.create_from_env()
    return _config_instance
