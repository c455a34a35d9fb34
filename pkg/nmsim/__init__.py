"""
nmsim: cycle-level simulator of a neuron-machine CNN accelerator
"""

__version__ = "1.0.0"
