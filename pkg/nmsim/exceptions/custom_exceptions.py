"""
自定义异常模块
定义nmsim模拟器中使用的所有自定义异常类
"""

from typing import Optional


class NmSimException(Exception):
    """nmsim基础异常类"""

    # CLI退出码：2 = 输入错误，3 = 内部不变量被破坏
    exit_code: int = 2

    def __init__(self, message: str, error_code: Optional[str] = None, cause: Optional[Exception] = None):
        """
        初始化异常

        Args:
            message: 错误信息
            error_code: 错误代码
            cause: 原始异常（用于异常链）
        """
        super().__init__(message)
        self.message = message
        self.error_code = error_code
        self.cause = cause

        # 设置异常链
        if cause is not None:
            self.__cause__ = cause

    def __str__(self) -> str:
        """返回格式化的错误信息"""
        if self.error_code:
            return f"[{self.error_code}] {self.message}"
        return self.message


class ConfigurationException(NmSimException):
    """硬件/数值配置异常"""

    def __init__(self, message: str, cause: Optional[Exception] = None):
        super().__init__(message, "CONFIG_ERROR", cause)


class ParseException(NmSimException):
    """模型描述文档格式错误"""

    def __init__(self, message: str, cause: Optional[Exception] = None):
        super().__init__(message, "PARSE_ERROR", cause)


class ShapeException(NmSimException):
    """层形状不匹配异常"""

    def __init__(self, message: str, layer_index: Optional[int] = None, cause: Optional[Exception] = None):
        super().__init__(message, "SHAPE_ERROR", cause)
        self.layer_index = layer_index


class SizeException(NmSimException):
    """二进制数据长度异常"""

    def __init__(self, message: str, expected: Optional[int] = None, actual: Optional[int] = None,
                 cause: Optional[Exception] = None):
        super().__init__(message, "SIZE_ERROR", cause)
        self.expected = expected
        self.actual = actual


class FormatException(NmSimException):
    """二进制文件头（魔数/版本）异常"""

    def __init__(self, message: str, cause: Optional[Exception] = None):
        super().__init__(message, "FORMAT_ERROR", cause)


class CapacityException(NmSimException):
    """MAU存储容量不足异常"""

    def __init__(self, message: str, cause: Optional[Exception] = None):
        super().__init__(message, "CAPACITY_ERROR", cause)


class ManifestException(NmSimException):
    """运行清单引用的文件缺失或无法解析"""

    def __init__(self, message: str, path: Optional[str] = None, cause: Optional[Exception] = None):
        super().__init__(message, "MANIFEST_ERROR", cause)
        self.path = path


class EmptyStatsException(NmSimException):
    """统计数据为空异常"""

    def __init__(self, message: str, cause: Optional[Exception] = None):
        super().__init__(message, "EMPTY_STATS", cause)


class BankConflictException(NmSimException):
    """同一周期内两个写操作落在同一存储体"""

    exit_code = 3

    def __init__(self, message: str, bank: Optional[int] = None, cause: Optional[Exception] = None):
        super().__init__(message, "BANK_CONFLICT", cause)
        self.bank = bank


class AccumulatorOverflowException(NmSimException, OverflowError):
    """累加器溢出异常"""

    exit_code = 3

    def __init__(self, message: str, cause: Optional[Exception] = None):
        super().__init__(message, "ACCUMULATOR_OVERFLOW", cause)


class OracleMismatchException(NmSimException):
    """模拟器输出与参考实现不一致"""

    exit_code = 3

    def __init__(self, message: str, layer_index: Optional[int] = None, cause: Optional[Exception] = None):
        super().__init__(message, "ORACLE_MISMATCH", cause)
        self.layer_index = layer_index


class PartitionViolationException(NmSimException):
    """乘法器周期统计不满足划分性质"""

    exit_code = 3

    def __init__(self, message: str, layer_index: Optional[int] = None, cause: Optional[Exception] = None):
        super().__init__(message, "PARTITION_VIOLATION", cause)
        self.layer_index = layer_index
