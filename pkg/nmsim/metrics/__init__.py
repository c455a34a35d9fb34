"""
Metrics module
Utilization, composition and architecture efficiency plus report writers
"""

from .utilization import (
    EFF_ARCH_NOTE,
    REFERENCE_VALUES,
    SHARE_FIELDS,
    build_report,
    composition,
    eff_arch,
    utilization
)
from .report import (
    TABLE_COLUMNS,
    render_table,
    report_json_bytes,
    table_rows,
    write_report_json,
    write_rows_csv,
    write_table_csv
)

__all__ = [
    'EFF_ARCH_NOTE',
    'REFERENCE_VALUES',
    'SHARE_FIELDS',
    'build_report',
    'composition',
    'eff_arch',
    'utilization',
    'TABLE_COLUMNS',
    'render_table',
    'report_json_bytes',
    'table_rows',
    'write_report_json',
    'write_rows_csv',
    'write_table_csv'
]
