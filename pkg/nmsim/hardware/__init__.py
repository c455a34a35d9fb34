"""
Hardware module
Memory part (MAU + receptor unit) and hardware neuron models
"""

from .memory_array import MemoryArrayUnit, region_words
from .receptor import (
    MaskedWindow,
    Receptor,
    ReceptorUnit,
    RuOutput,
    StridedReceptor,
    extract_windows,
    tap_offsets,
    tap_validity
)
from .neuron import HardwareNeuron, HnConfig, HnState, configure_hn, slot_tally

__all__ = [
    'MemoryArrayUnit',
    'region_words',
    'MaskedWindow',
    'Receptor',
    'ReceptorUnit',
    'RuOutput',
    'StridedReceptor',
    'extract_windows',
    'tap_offsets',
    'tap_validity',
    'HardwareNeuron',
    'HnConfig',
    'HnState',
    'configure_hn',
    'slot_tally'
]
