"""
命令行命令模块
simulate / predict / fuzz / dump-receptor / dump-hn 子命令
"""

import logging
import sys
from pathlib import Path
from typing import IO, Any, Dict, List, Optional, Sequence, Tuple

import click
from rich.console import Console

from ..config.hardware_profile import load_hw_config, load_resource_model
from ..control.executor import EXECUTION_MODES, SotExecutor
from ..control.sot_compiler import compile_sot, program_fps
from ..control.tracing import HN_COLUMNS, RECEPTOR_COLUMNS, trace_hn, trace_receptor_layer
from ..exceptions.custom_exceptions import NmSimException
from ..metrics.report import (
    TABLE_COLUMNS,
    render_table,
    report_json_bytes,
    table_rows,
    write_report_json,
    write_rows_csv,
    write_table_csv
)
from ..metrics.utilization import build_report
from ..oracle.reference import infer_ref
from .batch import run_batch
from .fuzz import FUZZ_MODE, run_fuzz
from .manifest import RunManifest

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ('csv', 'json', 'table')


def _emit(rows: List[Dict[str, Any]], columns: Sequence[str], fmt: str, stream: Optional[IO[str]] = None,
          title: Optional[str] = None) -> None:
    """按输出格式把同一份数据写到stream（默认stdout）"""
    stream = stream or sys.stdout
    if fmt == 'csv':
        write_rows_csv(rows, columns, stream)
    elif fmt == 'json':
        stream.write(report_json_bytes({'rows': rows}).decode('utf-8') + '\n')
    else:
        render_table(rows, Console(file=stream), columns=columns, title=title)


def _fail(error: NmSimException) -> int:
    logger.error(f"{type(error).__name__}: {error}")
    click.echo(f"error: {error}", err=True)
    return error.exit_code


def cmd_simulate(manifest: RunManifest, mode: str = 'auto', compare_oracle: bool = False,
                 fmt: str = 'table') -> int:
    """
    逐图像执行SOT程序并写出报告

    Args:
        manifest: 运行清单
        mode: 执行器模式
        compare_oracle: 是否同时运行参考实现并逐层比对
        fmt: 终端输出格式

    Returns:
        退出码：0成功，2输入错误，3内部不变量被破坏
    """
    try:
        run = manifest.load()
        program = compile_sot(run.model, run.hw)

        def simulate_one(image):
            executor = SotExecutor(run.hw, run.profile, mode=mode)
            return executor.run(program, run.weights, image)

        results = run_batch(simulate_one, run.images)
        _, stats = results[0]
        report = build_report(stats, load_resource_model(), run.hw)

        payload = report.model_dump(mode='json')
        payload['model'] = run.model.name
        payload['images'] = [{'index': i, 'path': str(path)} for i, path in enumerate(manifest.image_paths)]

        mismatched = False
        if compare_oracle:
            for entry, image, (outputs, _) in zip(payload['images'], run.images, results):
                expected, _ = infer_ref(run.model, run.weights, image, run.profile)
                bit_exact = {str(layer.index): actual == reference
                             for layer, actual, reference in zip(run.model.layers, outputs, expected)}
                entry['bit_exact'] = bit_exact
                for layer_index, exact in bit_exact.items():
                    click.echo(f"image {entry['index']} layer {layer_index}: bit-exact: {str(exact).lower()}")
                mismatched = mismatched or not all(bit_exact.values())

        rows = table_rows(program, run.hw, stats)
        if manifest.report_path is not None:
            write_report_json(payload, manifest.report_path)
        if manifest.table_path is not None:
            write_table_csv(rows, manifest.table_path)

        if fmt == 'json':
            click.echo(report_json_bytes(payload).decode('utf-8'))
        else:
            _emit(rows, TABLE_COLUMNS, fmt, title=run.model.name)
            click.echo(f"R_u = {report.r_u:.4f}, R_c = {report.r_c:.4f}, Eff_arch = {report.eff_arch:.4f}, "
                       f"cycles = {report.total_cycles}, fps = {report.fps:.2f}")
    except NmSimException as e:
        return _fail(e)

    if mismatched:
        click.echo("error: simulator output differs from the reference", err=True)
        return 3
    return 0


def cmd_predict(manifest: RunManifest, fmt: str = 'table') -> int:
    """
    静态预测：编译SOT后给出逐层周期数、峰值乘法器周期、闭式乘法数与fps

    Returns:
        退出码
    """
    try:
        run = manifest.load(require_weights=False, require_images=False)
        program = compile_sot(run.model, run.hw)
        rows = table_rows(program, run.hw)
        total = sum(row['B'] for row in rows)
        fps = program_fps(program, run.hw, total_cycles=total)

        if manifest.table_path is not None:
            write_table_csv(rows, manifest.table_path)
        if fmt == 'json':
            payload = {'model': run.model.name, 'total_cycles': total, 'fps': fps, 'layers': rows}
            click.echo(report_json_bytes(payload).decode('utf-8'))
        else:
            _emit(rows, TABLE_COLUMNS, fmt, title=run.model.name)
            click.echo(f"Predicted cycles = {total}, fps = {fps:.2f}")
    except NmSimException as e:
        return _fail(e)
    return 0


def cmd_fuzz(seed: int, count: int, hw_path: Optional[Path] = None, out_dir: Optional[Path] = None,
             mode: str = FUZZ_MODE) -> int:
    """
    随机对拍

    Returns:
        0全部通过；首个失败时返回该异常的退出码（复现包已写出）
    """
    try:
        hw = load_hw_config(hw_path)
        passed = run_fuzz(seed, count, hw, out_dir=out_dir, mode=mode)
    except NmSimException as e:
        return _fail(e)
    click.echo(f"{passed} fuzz cases passed (seed {seed})")
    return 0


def parse_at(value: str, fields: int) -> Tuple[List[int], int, int]:
    """
    解析 --at 参数，例如 "5,0:20" 或 "5,3,0:20"

    Returns:
        (前置整数列表, 起点, 终点)
    """
    parts = value.split(',')
    if len(parts) != fields + 1 or parts[-1].count(':') != 1:
        raise click.BadParameter(f"expected {fields} comma-separated integers and a range A:B, got '{value}'")
    try:
        head = [int(part) for part in parts[:-1]]
        start, stop = (int(bound) for bound in parts[-1].split(':'))
    except ValueError:
        raise click.BadParameter(f"'{value}' contains a non-integer field")
    if stop < start:
        raise click.BadParameter(f"range end {stop} precedes its start {start}")
    return head, start, stop


@click.group()
@click.option('--hw', 'hw_path', type=click.Path(path_type=Path), default=None, help='硬件参数YAML')
@click.option('--profile', default=None, help='数值精度配置：int8、wide或YAML路径')
@click.option('--format', 'fmt', type=click.Choice(OUTPUT_FORMATS), default='table', help='终端输出格式')
@click.option('--log-level', default=None, help='日志级别，覆盖NM_LOG_LEVEL')
@click.pass_context
def cli(ctx: click.Context, hw_path: Optional[Path], profile: Optional[str], fmt: str,
        log_level: Optional[str]) -> None:
    """Neuron-machine CNN accelerator simulator."""
    from ..main import setup_logging

    setup_logging(log_level)
    ctx.ensure_object(dict)
    ctx.obj.update({'hw_path': hw_path, 'profile': profile, 'fmt': fmt})


@cli.command()
@click.option('--model', 'model_path', required=True, type=click.Path(path_type=Path))
@click.option('--weights', 'weights_path', type=click.Path(path_type=Path), default=None)
@click.option('--image', 'image_paths', multiple=True, type=click.Path(path_type=Path))
@click.option('--mode', type=click.Choice(EXECUTION_MODES), default='auto')
@click.option('--report', 'report_path', type=click.Path(path_type=Path), default=None)
@click.option('--table', 'table_path', type=click.Path(path_type=Path), default=None)
@click.option('--compare-oracle', is_flag=True, default=False)
@click.pass_context
def simulate(ctx: click.Context, model_path: Path, weights_path: Optional[Path], image_paths: Tuple[Path, ...],
             mode: str, report_path: Optional[Path], table_path: Optional[Path], compare_oracle: bool) -> None:
    """执行模型并生成利用率报告"""
    manifest = RunManifest(
        model_path=model_path, weights_path=weights_path, image_paths=list(image_paths),
        hw_path=ctx.obj['hw_path'], profile=ctx.obj['profile'],
        report_path=report_path, table_path=table_path
    )
    ctx.exit(cmd_simulate(manifest, mode=mode, compare_oracle=compare_oracle, fmt=ctx.obj['fmt']))


@cli.command()
@click.option('--model', 'model_path', required=True, type=click.Path(path_type=Path))
@click.option('--table', 'table_path', type=click.Path(path_type=Path), default=None)
@click.pass_context
def predict(ctx: click.Context, model_path: Path, table_path: Optional[Path]) -> None:
    """不执行模型，按闭式调度公式预测周期数"""
    manifest = RunManifest(model_path=model_path, hw_path=ctx.obj['hw_path'], profile=ctx.obj['profile'],
                           table_path=table_path)
    ctx.exit(cmd_predict(manifest, fmt=ctx.obj['fmt']))


@cli.command()
@click.option('--seed', type=int, default=0)
@click.option('--count', type=click.IntRange(min=0), default=100)
@click.option('--out-dir', type=click.Path(path_type=Path), default=None)
@click.option('--mode', type=click.Choice(EXECUTION_MODES), default=FUZZ_MODE)
@click.pass_context
def fuzz(ctx: click.Context, seed: int, count: int, out_dir: Optional[Path], mode: str) -> None:
    """随机模型对拍：执行器与参考实现逐位一致"""
    ctx.exit(cmd_fuzz(seed, count, hw_path=ctx.obj['hw_path'], out_dir=out_dir, mode=mode))


def _trace_inputs(ctx: click.Context, model_path: Path, weights_path: Optional[Path], image_path: Path,
                  require_weights: bool):
    manifest = RunManifest(model_path=model_path, weights_path=weights_path, image_paths=[image_path],
                           hw_path=ctx.obj['hw_path'], profile=ctx.obj['profile'])
    run = manifest.load(require_weights=require_weights)
    return run, compile_sot(run.model, run.hw)


def _write_trace(rows: List[Dict[str, Any]], columns: Sequence[str], fmt: str, out: Optional[Path]) -> None:
    # 追踪表只输出CSV或JSON
    fmt = 'json' if fmt == 'json' else 'csv'
    if out is None:
        _emit(rows, columns, fmt)
        return
    with open(out, 'w', encoding='utf-8', newline='') as stream:
        _emit(rows, columns, fmt, stream)


@cli.command('dump-receptor')
@click.option('--model', 'model_path', required=True, type=click.Path(path_type=Path))
@click.option('--image', 'image_path', required=True, type=click.Path(path_type=Path))
@click.option('--weights', 'weights_path', type=click.Path(path_type=Path), default=None)
@click.option('--at', 'at', required=True, help='L,A:B：层编号与时刻区间')
@click.option('--out', type=click.Path(path_type=Path), default=None)
@click.pass_context
def dump_receptor(ctx: click.Context, model_path: Path, image_path: Path, weights_path: Optional[Path],
                  at: str, out: Optional[Path]) -> None:
    """输出receptor逐周期轨迹"""
    (layer_index,), start, stop = parse_at(at, 1)
    try:
        run, program = _trace_inputs(ctx, model_path, weights_path, image_path, require_weights=False)
        rows = trace_receptor_layer(program, run.weights, run.images[0], run.hw, run.profile,
                                    layer_index, start, stop)
        _write_trace(rows, RECEPTOR_COLUMNS, ctx.obj['fmt'], out)
    except NmSimException as e:
        ctx.exit(_fail(e))


@cli.command('dump-hn')
@click.option('--model', 'model_path', required=True, type=click.Path(path_type=Path))
@click.option('--weights', 'weights_path', required=True, type=click.Path(path_type=Path))
@click.option('--image', 'image_path', required=True, type=click.Path(path_type=Path))
@click.option('--at', 'at', required=True, help='L,HN,A:B：层编号、HN编号与周期区间')
@click.option('--out', type=click.Path(path_type=Path), default=None)
@click.pass_context
def dump_hn(ctx: click.Context, model_path: Path, weights_path: Path, image_path: Path,
            at: str, out: Optional[Path]) -> None:
    """输出单个HN的逐周期乘积与累加轨迹"""
    (layer_index, hn_index), start, stop = parse_at(at, 2)
    try:
        run, program = _trace_inputs(ctx, model_path, weights_path, image_path, require_weights=True)
        rows = trace_hn(program, run.weights, run.images[0], run.hw, run.profile,
                        layer_index, hn_index, start, stop)
        _write_trace(rows, HN_COLUMNS, ctx.obj['fmt'], out)
    except NmSimException as e:
        ctx.exit(_fail(e))
