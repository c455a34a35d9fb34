"""
Exception handling module
Defines all custom exception classes used in nmsim
"""

from .custom_exceptions import (
    NmSimException,
    ConfigurationException,
    ParseException,
    ShapeException,
    SizeException,
    FormatException,
    CapacityException,
    ManifestException,
    EmptyStatsException,
    BankConflictException,
    AccumulatorOverflowException,
    OracleMismatchException,
    PartitionViolationException
)

__all__ = [
    'NmSimException',
    'ConfigurationException',
    'ParseException',
    'ShapeException',
    'SizeException',
    'FormatException',
    'CapacityException',
    'ManifestException',
    'EmptyStatsException',
    'BankConflictException',
    'AccumulatorOverflowException',
    'OracleMismatchException',
    'PartitionViolationException'
]
