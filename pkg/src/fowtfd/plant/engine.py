"""Scenario simulation driver.

Selects the compiled stepping kernel when available (set
``FOWTFD_PURE_PYTHON=1`` to force the pure-Python engine), pre-draws all
stochastic inputs for determinism and runs the per-step loop.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import engine_py
from ._packing import pack_params
from .equilibrium import operating_point
from .faults import ALL_FAULTS, FaultSpec, validate_fault_list
from .params import (
    ConfigurationError, LoadCase, N_INPUTS, N_OUTPUTS, N_STATES, NumericError,
    PlantParams, get_load_case,
)
from .wind import draw_disturbances

try:  # compiled kernel is optional
    from . import _engine as _compiled
except ImportError:  # pragma: no cover - build-dependent
    _compiled = None


def available_engines() -> dict[str, object]:
    engines = {"python": engine_py}
    if _compiled is not None:
        engines["cython"] = _compiled
    return engines


def select_engine(name: Optional[str] = None):
    engines = available_engines()
    if name is None:
        if os.environ.get("FOWTFD_PURE_PYTHON"):
            return engines["python"]
        return engines.get("cython", engines["python"])
    try:
        return engines[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown engine {name!r}; available: {sorted(engines)}") from None


@dataclass(frozen=True)
class MeasurementFrame:
    """One time step of the measurement stream."""

    t: float
    y: np.ndarray   # 10 output channels, physical units
    u: np.ndarray   # (pitch command, torque command)


@dataclass
class Trace:
    """Simulation record at the full stepping rate."""

    t: np.ndarray
    u: np.ndarray            # (n, 2)
    y: np.ndarray            # (n, 10)
    lc: LoadCase
    seed: int
    dt: float
    faults: tuple = ()
    x: Optional[np.ndarray] = None   # (n, 12) when states were stored

    def __len__(self) -> int:
        return len(self.t)

    def frame(self, i: int) -> MeasurementFrame:
        return MeasurementFrame(float(self.t[i]), self.y[i].copy(), self.u[i].copy())

    def channel(self, ch: int) -> np.ndarray:
        return self.y[:, ch]


# The stepping kernels index the fault table by fault number, f1..f11.
KERNEL_FAULT_ORDER = tuple(f"f{i}" for i in range(1, 12))


def _fault_tables(faults: Sequence[FaultSpec], dt: float, nsteps: int):
    mag = np.zeros(len(KERNEL_FAULT_ORDER))
    k0 = np.zeros(len(KERNEL_FAULT_ORDER), dtype=np.int64)
    k1 = np.zeros(len(KERNEL_FAULT_ORDER), dtype=np.int64)
    index = {fid: i for i, fid in enumerate(KERNEL_FAULT_ORDER)}
    for f in faults:
        i = index[f.id]
        mag[i] = f.magnitude
        k0[i] = int(round(f.t_start / dt))
        k1[i] = nsteps if math.isinf(f.t_end) else int(round(f.t_end / dt))
    return mag, k0, k1


def simulate(lc: LoadCase | int, faults: Sequence[FaultSpec] = (), duration: float = 1000.0,
             seed: int = 0, params: Optional[PlantParams] = None, noise: bool = True,
             u_extra: Optional[np.ndarray] = None, store_states: bool = False,
             engine: Optional[str] = None, open_loop: bool = False) -> Trace:
    """Run one closed-loop scenario and return its measurement trace.

    Identical arguments produce bit-identical traces regardless of the
    engine in use.
    """
    if duration <= 0:
        raise ConfigurationError("duration must be positive")
    if not isinstance(lc, LoadCase):
        lc = get_load_case(lc)
    p = params or PlantParams()
    faults = tuple(faults)
    validate_fault_list(list(faults))

    nsteps = int(round(duration / p.dt))
    op = operating_point(p, lc)
    par = pack_params(p, lc, op, open_loop=open_loop)
    x = op.x_eq.copy()
    if not np.all(np.isfinite(x)):
        raise NumericError("non-finite equilibrium state at step 0")

    wind, eta_x, eta_y = draw_disturbances(p, lc, seed, nsteps, noise=noise)
    mag, k0, k1 = _fault_tables(faults, p.dt, nsteps)

    u_out = np.empty((nsteps, N_INPUTS))
    y_out = np.empty((nsteps, N_OUTPUTS))
    x_out = np.empty((nsteps, N_STATES)) if store_states else None
    if u_extra is not None:
        u_extra = np.ascontiguousarray(u_extra, dtype=float)
        if u_extra.shape != (nsteps, N_INPUTS):
            raise ConfigurationError(
                f"u_extra must have shape ({nsteps}, {N_INPUTS}), got {u_extra.shape}")

    eng = select_engine(engine)
    eng.run_loop(par, x, 0.0, nsteps, wind, eta_x, eta_y, u_extra,
                 mag, k0, k1, u_out, y_out, x_out)

    if not np.all(np.isfinite(y_out)):
        bad = int(np.argwhere(~np.isfinite(y_out).all(axis=1))[0][0])
        raise NumericError(f"non-finite output at step {bad}")

    t = np.arange(nsteps) * p.dt
    return Trace(t=t, u=u_out, y=y_out, lc=lc, seed=seed, dt=p.dt,
                 faults=faults, x=x_out)


def run_scenario(lc: LoadCase | int, faults: Sequence[FaultSpec] = (),
                 duration: float = 1000.0, seed: int = 0, **kw) -> Trace:
    """Spec-facing alias of :func:`simulate`."""
    return simulate(lc, faults, duration, seed, **kw)
