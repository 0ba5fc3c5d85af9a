"""Generalized binary noise excitation for identification experiments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ExcitationSpec:
    amplitude: float
    switch_probability: float   # per-step probability of a level change
    n: int
    seed: int

    def __post_init__(self):
        if not 0.0 < self.switch_probability < 1.0:
            raise ValueError("switch_probability must be in (0, 1)")
        if self.amplitude <= 0.0:
            raise ValueError("amplitude must be positive")
        if self.n < 1:
            raise ValueError("n must be >= 1")


def gbn(spec: ExcitationSpec) -> np.ndarray:
    """Two-level random-switching signal in {-amplitude, +amplitude}.

    The hold time between switches is geometric with mean
    1/switch_probability steps.
    """
    rng = np.random.default_rng(spec.seed)
    draws = rng.random(spec.n)
    signs = np.empty(spec.n)
    level = 1.0 if draws[0] > 0.5 else -1.0
    signs[0] = level
    for k in range(1, spec.n):
        if draws[k] < spec.switch_probability:
            level = -level
        signs[k] = level
    return spec.amplitude * signs
