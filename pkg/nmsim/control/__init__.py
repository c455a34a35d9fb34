"""
Control module
SOT compilation, binary codec, program execution and debug tracing
"""

from .sot_compiler import BankAllocator, compile_sot, predict_cycles, predict_program, program_fps
from .sot_codec import load_sot, save_sot
from .executor import EXECUTION_MODES, HnEvent, PortActivity, SotExecutor, execute
from .tracing import HN_COLUMNS, RECEPTOR_COLUMNS, trace_hn, trace_receptor, trace_receptor_layer

__all__ = [
    'BankAllocator',
    'compile_sot',
    'predict_cycles',
    'predict_program',
    'program_fps',
    'load_sot',
    'save_sot',
    'EXECUTION_MODES',
    'HnEvent',
    'PortActivity',
    'SotExecutor',
    'execute',
    'HN_COLUMNS',
    'RECEPTOR_COLUMNS',
    'trace_hn',
    'trace_receptor',
    'trace_receptor_layer'
]
