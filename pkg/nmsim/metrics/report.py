"""
报告输出模块
JSON报告（orjson，键排序，确定性输出）、逐层周期表CSV与rich终端表格
"""

import csv
from pathlib import Path
from typing import Any, Dict, IO, List, Optional, Sequence, Union

import orjson
from rich.console import Console
from rich.table import Table

from ..config.settings import HwConfig
from ..control.sot_compiler import predict_cycles
from ..models.sot_models import SotProgram
from ..models.stats_models import CycleStats, UtilizationReport
from ..oracle.reference import count_mul_eq2

TABLE_COLUMNS = ('L', 'Type', 'W_in', 'H_in', 'W_out', 'H_out', 'C', 'F', 'A', 'A_eq2', 'B', 'C_peak')


def table_rows(program: SotProgram, hw: HwConfig, stats: Optional[CycleStats] = None) -> List[Dict[str, Any]]:
    """
    生成逐层周期表数据

    有执行统计时A为实测有效乘法数，否则为闭式乘法数；B来自统计或闭式预测。

    Args:
        program: SOT程序
        hw: 硬件参数
        stats: 执行统计（可选）

    Returns:
        行字典列表，列见TABLE_COLUMNS
    """
    measured = {layer.layer_index: layer for layer in stats.layers} if stats is not None else {}
    rows = []
    for row in program.rows:
        eq2 = count_mul_eq2(row.layer_spec())
        layer_stats = measured.get(row.layer_index)
        cycles = layer_stats.cycles_b if layer_stats is not None else predict_cycles(row, hw)
        rows.append({
            'L': row.layer_index,
            'Type': row.kind.table_label,
            'W_in': row.w_in,
            'H_in': row.h_in,
            'W_out': row.w_out,
            'H_out': row.h_out,
            'C': row.c_in,
            'F': row.f_out,
            'A': layer_stats.effective_muls_a if layer_stats is not None else eq2,
            'A_eq2': eq2,
            'B': cycles,
            'C_peak': cycles * hw.m,
        })
    return rows


def write_rows_csv(rows: List[Dict[str, Any]], columns: Sequence[str], stream: IO[str]) -> None:
    """按列顺序写CSV"""
    writer = csv.DictWriter(stream, fieldnames=list(columns), lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow({column: row.get(column, '') for column in columns})


def write_table_csv(rows: List[Dict[str, Any]], path: Union[str, Path]) -> None:
    """写逐层周期表CSV文件"""
    with open(path, 'w', encoding='utf-8', newline='') as stream:
        write_rows_csv(rows, TABLE_COLUMNS, stream)


def report_json_bytes(payload: Union[UtilizationReport, Dict[str, Any]]) -> bytes:
    """序列化报告：键排序、2空格缩进，同样输入得到逐字节相同的输出"""
    data = payload.model_dump(mode='json') if isinstance(payload, UtilizationReport) else payload
    return orjson.dumps(data, option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2 | orjson.OPT_NON_STR_KEYS)


def write_report_json(payload: Union[UtilizationReport, Dict[str, Any]], path: Union[str, Path]) -> None:
    Path(path).write_bytes(report_json_bytes(payload))


def render_table(rows: List[Dict[str, Any]], console: Optional[Console] = None,
                 columns: Sequence[str] = TABLE_COLUMNS, title: Optional[str] = None) -> None:
    """用rich在终端渲染表格"""
    console = console or Console()
    table = Table(title=title)
    for column in columns:
        table.add_column(column, justify='right' if column not in ('Type',) else 'left')
    for row in rows:
        table.add_row(*(str(row.get(column, '')) for column in columns))
    console.print(table)
