"""Floating offshore wind turbine fault-diagnosis benchmark.

A desk-scale surrogate of a 10 MW floating turbine with 11 injectable
faults, a mixed model/signal-based fault-diagnosis architecture (adaptive
observers with time-varying thresholds plus a spectrogram/nearest-neighbour
scheme for mooring faults) and PCA/DPCA baselines for comparison.
"""

__version__ = "0.1.0"


def compiled_kernel_active() -> bool:
    """True when the compiled stepping kernel is importable and selected."""
    from .plant.engine import select_engine

    return getattr(select_engine(), "ENGINE_NAME", "python") == "cython"
