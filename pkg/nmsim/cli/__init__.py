"""
CLI module
Click commands, run manifests, the fuzz campaign and the batch runner
"""

from .batch import run_batch
from .commands import OUTPUT_FORMATS, cli, cmd_fuzz, cmd_predict, cmd_simulate, parse_at
from .fuzz import FuzzCase, check_case, random_case, random_model, run_fuzz, write_repro
from .manifest import LoadedRun, RunManifest

__all__ = [
    'run_batch',
    'OUTPUT_FORMATS',
    'cli',
    'cmd_fuzz',
    'cmd_predict',
    'cmd_simulate',
    'parse_at',
    'FuzzCase',
    'check_case',
    'random_case',
    'random_model',
    'run_fuzz',
    'write_repro',
    'LoadedRun',
    'RunManifest'
]
