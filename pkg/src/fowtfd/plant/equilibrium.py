"""Steady-state operating points of the surrogate plant per load case."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from . import aero, model
from .params import (
    CH_ACCEL, CH_POWER, IDX_BLADE, IDX_GEN, IDX_MOOR, IDX_PITCH, IDX_ROTOR,
    IDX_SURGE, IDX_TORQUE, IDX_TOWER, ConfigurationError, LoadCase, N_STATES,
    PlantParams,
)


@dataclass(frozen=True)
class OperatingPoint:
    lc_id: int
    x_eq: np.ndarray      # absolute equilibrium state
    u_eq: np.ndarray      # (pitch command, torque command)
    y_eq: np.ndarray      # physical outputs at equilibrium
    above_rated: bool
    thrust: float
    aero_torque: float


def _solve_surge(p: PlantParams, thrust: float) -> float:
    """Invert the piecewise-linear mooring curve for the static surge offset."""
    return brentq(lambda s: -model.mooring_force(p, s) - thrust, -5.0, 200.0, xtol=1e-10)


@lru_cache(maxsize=64)
def operating_point(p: PlantParams, lc: LoadCase) -> OperatingPoint:
    above_rated = lc.u_m >= p.rated_wind
    ng = p.gear_ratio

    if above_rated:
        wg = p.rated_gen_speed
        tq = min(p.rated_torque, p.torque_law_gain * wg**2)
        wr = wg / ng + ng * tq / p.shaft_damping
        target = ng * tq

        def torque_gap(pitch):
            return aero.rotor_loads(p, lc.u_m, wr, pitch)[0] - target

        if torque_gap(0.0) < 0.0:
            raise ConfigurationError(
                f"load case {lc.id}: available torque below rated at {lc.u_m} m/s")
        pitch = brentq(torque_gap, 0.0, p.pitch_max, xtol=1e-12)
    else:
        pitch = p.fine_pitch
        k_law = p.torque_law_gain

        def speed_gap(wr_try):
            ta = aero.rotor_loads(p, lc.u_m, wr_try, pitch)[0]
            wg_try = ng * (wr_try - ta / p.shaft_damping)
            return ta - ng * min(p.rated_torque, k_law * wg_try**2)

        wr = brentq(speed_gap, 0.15, p.rated_rotor_speed * 1.3, xtol=1e-12)
        ta = aero.rotor_loads(p, lc.u_m, wr, pitch)[0]
        wg = ng * (wr - ta / p.shaft_damping)
        tq = min(p.rated_torque, k_law * wg**2)

    torque_a, thrust = aero.rotor_loads(p, lc.u_m, wr, pitch)
    x = np.zeros(N_STATES)
    x[IDX_SURGE] = _solve_surge(p, thrust)
    x[IDX_PITCH] = thrust * p.thrust_arm / p.pitch_stiffness
    x[IDX_TOWER] = thrust / p.tower_stiffness
    x[IDX_ROTOR] = wr
    x[IDX_GEN] = wg
    x[IDX_BLADE] = pitch
    x[IDX_TORQUE] = tq
    x[IDX_MOOR] = 0.0

    y = model.output_matrix(p) @ x
    # The accelerometer channel reads zero at rest (its row applies to
    # deviations) and the power transducer is affine about the rated point.
    y[CH_ACCEL] = 0.0
    y[CH_POWER] = (p.rated_power
                   + p.power_gain * (wg - p.rated_gen_speed)
                   + p.gen_efficiency * p.rated_gen_speed * (tq - p.rated_torque))
    return OperatingPoint(
        lc_id=lc.id,
        x_eq=x,
        u_eq=np.array([pitch, tq]),
        y_eq=y,
        above_rated=above_rated,
        thrust=thrust,
        aero_torque=torque_a,
    )
