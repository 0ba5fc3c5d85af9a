"""Identification experiment on the surrogate plant.

Runs the closed-loop plant at a steady operating point with generalized
binary noise added to both control inputs, block-averages to the diagnosis
rate and identifies a state-space model on normalized monitored channels.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..plant.engine import Trace, simulate
from ..plant.equilibrium import operating_point
from ..plant.io import DECIMATION_FACTOR, decimate_trace
from ..plant.params import (
    CH_BEND, CH_GEN, CH_POWER, CH_ROTOR, CH_TORQUE, MONITORED_NAMES,
    PlantParams, get_load_case,
)
from .gbn import ExcitationSpec, gbn
from .subspace import IdentifiedModel, subspace_identify

# Fixed per-channel scales used to normalize deviations from the operating
# point before identification and monitoring.  Chosen so healthy deviations
# are order 0.1-0.5 and the benchmark fault magnitudes land around 5-10.
MONITORED_SCALES = np.array([
    0.5,     # generator speed (rad/s)
    1.0e5,   # generator power (W)
    1.0e6,   # bending moment (N m)
    0.01,    # rotor speed (rad/s)
    0.02,    # collective pitch (rad)
    2.0e3,   # generator torque (N m)
])
INPUT_SCALES = np.array([0.02, 5.0e3])  # pitch command (rad), torque command (N m)

FD_DT = 0.2  # diagnosis-layer sample time (s)

# Per-load-case excitation amplitudes; responses stay in a comparable
# near-linear range at each operating point.  The torque excitation backs
# off at high-wind turbulent cases where it would mask the torque-tracking
# law's own variation.
PITCH_GBN_AMPLITUDE = {1: 0.012, 2: 0.035, 3: 0.024, 4: 0.012, 5: 0.035,
                       6: 0.024, 7: 0.02}
TORQUE_GBN_AMPLITUDE = {1: 8.0e3, 2: 8.0e3, 3: 8.0e3, 4: 8.0e3, 5: 2.0e3,
                        6: 2.0e3, 7: 8.0e3}


def monitored_outputs(y: np.ndarray) -> np.ndarray:
    """Map 10 plant channels to the 6 monitored diagnosis channels."""
    y = np.atleast_2d(y)
    cols = [
        y[:, CH_GEN],
        y[:, CH_POWER],
        y[:, CH_BEND],
        y[:, CH_ROTOR],
        y[:, :3].mean(axis=1),
        y[:, CH_TORQUE],
    ]
    out = np.column_stack(cols)
    return out[0] if out.shape[0] == 1 and y.shape[0] == 1 else out


def monitored_operating_point(params: PlantParams, lc_id: int) -> tuple[np.ndarray, np.ndarray]:
    """(y_op, u_op) of the monitored channels at the load-case equilibrium."""
    op = operating_point(params, get_load_case(lc_id))
    return monitored_outputs(op.y_eq[None, :])[0], op.u_eq.copy()


def normalize_monitored(y_m: np.ndarray, u: np.ndarray, y_op: np.ndarray,
                        u_op: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return (y_m - y_op) / MONITORED_SCALES, (u - u_op) / INPUT_SCALES


def gbn_inputs(n_fd: int, seed: int, pitch_amplitude: float,
               torque_amplitude: float, switch_probability: float = 0.05,
               factor: int = DECIMATION_FACTOR) -> np.ndarray:
    """Two-channel GBN at the diagnosis rate, upsampled to the plant rate."""
    g1 = gbn(ExcitationSpec(pitch_amplitude, switch_probability, n_fd, seed * 2 + 1))
    g2 = gbn(ExcitationSpec(torque_amplitude, switch_probability, n_fd, seed * 2 + 2))
    return np.repeat(np.column_stack([g1, g2]), factor, axis=0)


def _pitch_sensitivity(p: PlantParams, lc_id: int) -> float:
    """|dT_aero/dpitch| at the operating point (N m / rad)."""
    from ..plant import aero

    op = operating_point(p, get_load_case(lc_id))
    wr = op.x_eq[6]
    pitch = op.u_eq[0]
    h = 0.002
    t_hi = aero.rotor_loads(p, get_load_case(lc_id).u_m, wr, pitch + h)[0]
    t_lo = aero.rotor_loads(p, get_load_case(lc_id).u_m, wr, max(pitch - h, 0.0))[0]
    return abs(t_hi - t_lo) / (pitch + h - max(pitch - h, 0.0))


def identification_experiment(lc_id: int, seed: int = 1000,
                              params: Optional[PlantParams] = None,
                              duration: Optional[float] = None,
                              pitch_amplitude: Optional[float] = None,
                              torque_amplitude: Optional[float] = None) -> Trace:
    """Simulate the GBN excitation run and return the decimated trace.

    The excitation rides on the closed-loop commands at the steady
    operating point.  Pitch amplitudes are per-load-case constants chosen
    so the speed response explores a comparable near-linear range
    everywhere; below rated the pitch excitation is biased upward to stay
    on the live side of the fine-pitch aerodynamic floor.
    """
    p = params or PlantParams()
    lc = get_load_case(lc_id)
    if duration is None:
        duration = 1800.0 if lc.wind_kind == "turbulent" else 1200.0
    if pitch_amplitude is None:
        pitch_amplitude = PITCH_GBN_AMPLITUDE[lc_id]
    if torque_amplitude is None:
        torque_amplitude = TORQUE_GBN_AMPLITUDE[lc_id]
    n_fd = int(round(duration / FD_DT))
    u_extra = gbn_inputs(n_fd, seed, pitch_amplitude, torque_amplitude)
    if not operating_point(p, lc).above_rated:
        u_extra[:, 0] += 1.2 * pitch_amplitude
    trace = simulate(lc, duration=duration, seed=seed, params=p, u_extra=u_extra)
    return decimate_trace(trace)


def identify_plant(lc_id: int, seed: int = 1000, order: int = 8, horizon: int = 20,
                   params: Optional[PlantParams] = None,
                   duration: float = 1200.0) -> IdentifiedModel:
    """Full identification pipeline for one load case."""
    p = params or PlantParams()
    dec = identification_experiment(lc_id, seed, p, duration)
    y_op, u_op = monitored_operating_point(p, lc_id)
    y_n, u_n = normalize_monitored(monitored_outputs(dec.y), dec.u, y_op, u_op)
    # Center on the sample means so slow bias does not masquerade as a
    # near-integrator mode; the means refine the stored operating point.
    y_mean = y_n.mean(axis=0)
    u_mean = u_n.mean(axis=0)
    model = subspace_identify(u_n - u_mean, y_n - y_mean,
                              order=order, horizon=horizon, dt=FD_DT)
    model.u_op = u_op + u_mean * INPUT_SCALES
    model.y_op = y_op + y_mean * MONITORED_SCALES
    model.u_scale = INPUT_SCALES.copy()
    model.y_scale = MONITORED_SCALES.copy()
    model.channels = MONITORED_NAMES
    model.lc_id = lc_id
    return model
