"""State-space view of the surrogate plant.

The true dynamics advance as ``x(k+1) = A0 x(k) + rho(x(k), u(k)) + eta_x(k)``
with ``y(k) = C0 x(k) + eta_y(k)`` where states are deviations from the load
case's equilibrium.  ``A0`` collects the constant linear terms (structural
stiffness and damping, actuator lags, drivetrain coupling, a fixed reference
aerodynamic damping); everything else, including all input terms and the
aerodynamic and mooring nonlinearities, lives in ``rho``.  By construction
``rho`` vanishes at the equilibrium.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import aero
from .faults import HEALTHY_EFFECT, StructuralEffect
from .params import (
    CH_ACCEL, CH_BEND, CH_BEND_AUX, CH_GEN, CH_PITCH_1, CH_PITCH_2,
    CH_PITCH_3, CH_POWER, CH_ROTOR, CH_TORQUE, IDX_BLADE, IDX_BLADE_VEL,
    IDX_GEN, IDX_MOOR, IDX_PITCH, IDX_PITCH_VEL, IDX_ROTOR, IDX_SURGE,
    IDX_SURGE_VEL, IDX_TORQUE, IDX_TOWER, IDX_TOWER_VEL, LoadCase,
    N_INPUTS, N_OUTPUTS, N_STATES, NumericError, PlantParams,
)

# Fixed reference aerodynamic damping extracted into the linear part so the
# rotor-speed mode is strictly stable in A0 (the exact aerodynamic torque in
# rho compensates for it pointwise).
REF_AERO_DAMPING = 1.5e7  # N m s/rad on the low-speed shaft


def mooring_force(p: PlantParams, displacement: float, k_scale: float = 1.0) -> float:
    """Restoring force (N) of the piecewise-linear mooring curve (opposes d)."""
    d = displacement
    f = p.moor_k_inner * d
    if d > p.moor_knee:
        f += p.moor_k_outer * (d - p.moor_knee)
    elif d < -p.moor_knee:
        f += p.moor_k_outer * (d + p.moor_knee)
    return -f * k_scale


def derivatives(p: PlantParams, x, pitch_drive: float, torque_target: float,
                wind: float, effect: StructuralEffect = HEALTHY_EFFECT) -> np.ndarray:
    """Continuous-time derivatives of the absolute (physical) state."""
    s, ds, phi, dphi, b, db, wr, wg, th, dth, tg, xm = x
    v_rel = wind - ds - p.hub_height * dphi - db
    torque_a, thrust = aero.rotor_loads(p, v_rel, wr, th, effect.blade_scale)
    f_moor = mooring_force(p, s - xm, effect.moor_k_scale)
    slip = wr - wg / p.gear_ratio
    t_shaft = p.shaft_damping * slip
    wn = p.pitch_act_omega
    dx = np.empty(N_STATES)
    dx[IDX_SURGE] = ds
    dx[IDX_SURGE_VEL] = (thrust + f_moor - p.surge_damping * ds) / p.surge_mass
    dx[IDX_PITCH] = dphi
    dx[IDX_PITCH_VEL] = (thrust * p.thrust_arm - p.pitch_stiffness * phi
                         - p.pitch_damping * dphi) / p.pitch_inertia
    dx[IDX_TOWER] = db
    dx[IDX_TOWER_VEL] = (thrust - p.tower_stiffness * b
                         - p.tower_damping * effect.tower_d_scale * db) \
        / (p.tower_mass * effect.tower_m_scale)
    dx[IDX_ROTOR] = (torque_a - t_shaft) / p.rotor_inertia
    dx[IDX_GEN] = (t_shaft / p.gear_ratio - tg) / p.gen_inertia
    dx[IDX_BLADE] = dth
    dx[IDX_BLADE_VEL] = wn * wn * (pitch_drive - th) - 2.0 * p.pitch_act_zeta * wn * dth
    dx[IDX_TORQUE] = (torque_target - tg) / p.torque_act_tau
    dx[IDX_MOOR] = (effect.neutral_shift - xm) / p.moor_relax_time
    return dx


def linear_part(p: PlantParams) -> np.ndarray:
    """Continuous-time coefficient matrix of the linear terms in A0."""
    J = np.zeros((N_STATES, N_STATES))
    J[IDX_SURGE, IDX_SURGE_VEL] = 1.0
    J[IDX_SURGE_VEL, IDX_SURGE] = -p.moor_k_inner / p.surge_mass
    J[IDX_SURGE_VEL, IDX_MOOR] = p.moor_k_inner / p.surge_mass
    J[IDX_SURGE_VEL, IDX_SURGE_VEL] = -p.surge_damping / p.surge_mass
    J[IDX_PITCH, IDX_PITCH_VEL] = 1.0
    J[IDX_PITCH_VEL, IDX_PITCH] = -p.pitch_stiffness / p.pitch_inertia
    J[IDX_PITCH_VEL, IDX_PITCH_VEL] = -p.pitch_damping / p.pitch_inertia
    J[IDX_TOWER, IDX_TOWER_VEL] = 1.0
    J[IDX_TOWER_VEL, IDX_TOWER] = -p.tower_stiffness / p.tower_mass
    J[IDX_TOWER_VEL, IDX_TOWER_VEL] = -p.tower_damping / p.tower_mass
    d = p.shaft_damping
    J[IDX_ROTOR, IDX_ROTOR] = -(d + REF_AERO_DAMPING) / p.rotor_inertia
    J[IDX_ROTOR, IDX_GEN] = d / (p.gear_ratio * p.rotor_inertia)
    J[IDX_GEN, IDX_ROTOR] = d / (p.gear_ratio * p.gen_inertia)
    J[IDX_GEN, IDX_GEN] = -d / (p.gear_ratio**2 * p.gen_inertia)
    J[IDX_GEN, IDX_TORQUE] = -1.0 / p.gen_inertia
    J[IDX_BLADE, IDX_BLADE_VEL] = 1.0
    wn = p.pitch_act_omega
    J[IDX_BLADE_VEL, IDX_BLADE] = -wn * wn
    J[IDX_BLADE_VEL, IDX_BLADE_VEL] = -2.0 * p.pitch_act_zeta * wn
    J[IDX_TORQUE, IDX_TORQUE] = -1.0 / p.torque_act_tau
    J[IDX_MOOR, IDX_MOOR] = -1.0 / p.moor_relax_time
    return J


def output_matrix(p: PlantParams) -> np.ndarray:
    """Nominal output map C0 (applies to deviation or absolute states)."""
    C = np.zeros((N_OUTPUTS, N_STATES))
    for ch in (CH_PITCH_1, CH_PITCH_2, CH_PITCH_3):
        C[ch, IDX_BLADE] = 1.0
    C[CH_TORQUE, IDX_TORQUE] = 1.0
    C[CH_ROTOR, IDX_ROTOR] = 1.0
    C[CH_GEN, IDX_GEN] = 1.0
    # Power transducer linearized about the rated point:
    # P = P_rated + T_rated (w - w_rated) + w_rated (T - T_rated).
    C[CH_POWER, IDX_GEN] = p.power_gain
    C[CH_POWER, IDX_TORQUE] = p.gen_efficiency * p.rated_gen_speed
    C[CH_BEND, IDX_TOWER] = p.bend_gain
    C[CH_BEND_AUX, IDX_TOWER] = p.bend_aux_gain
    C[CH_BEND_AUX, IDX_PITCH] = p.bend_aux_pitch_gain
    C[CH_ACCEL, IDX_TOWER] = -p.tower_stiffness / p.tower_mass
    C[CH_ACCEL, IDX_TOWER_VEL] = -p.tower_damping / p.tower_mass
    return C


def nonlinear_increment(p: PlantParams, x_dev, u, lc: LoadCase,
                        effect: StructuralEffect = HEALTHY_EFFECT,
                        x_eq=None) -> np.ndarray:
    """rho(x, u): the per-step nonlinear state increment in deviation coordinates."""
    from .equilibrium import operating_point

    if x_eq is None:
        x_eq = operating_point(p, lc).x_eq
    x_abs = np.asarray(x_dev, dtype=float) + x_eq
    dx = derivatives(p, x_abs, float(u[0]), float(u[1]), lc.u_m, effect)
    J = linear_part(p)
    return p.dt * dx - p.dt * (J @ np.asarray(x_dev, dtype=float))


@dataclass
class PlantModel:
    """Benchmark plant in the canonical additive-fault state-space form."""

    n_states: int
    n_inputs: int
    n_outputs: int
    a0: np.ndarray                       # discrete nominal linear part
    rho: Callable                        # (x_dev, u) -> state increment
    c0: np.ndarray
    eta_x_bound: np.ndarray              # per-state disturbance amplitude
    eta_y_bound: np.ndarray              # per-output noise amplitude
    dt: float
    x_eq: Optional[np.ndarray] = None    # equilibrium in absolute coordinates
    u_eq: Optional[np.ndarray] = None
    y_eq: Optional[np.ndarray] = None

    def spectral_radius(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvals(self.a0))))


def build_plant_model(p: PlantParams, lc: LoadCase,
                      effect: StructuralEffect = HEALTHY_EFFECT) -> PlantModel:
    """Assemble the deviation-coordinate PlantModel for one load case."""
    from .equilibrium import operating_point
    from .wind import disturbance_bounds

    op = operating_point(p, lc)
    x_eq = op.x_eq

    def rho(x_dev, u, _effect=effect, _x_eq=x_eq):
        return nonlinear_increment(p, x_dev, u, lc, _effect, x_eq=_x_eq)

    return PlantModel(
        n_states=N_STATES,
        n_inputs=N_INPUTS,
        n_outputs=N_OUTPUTS,
        a0=np.eye(N_STATES) + p.dt * linear_part(p),
        rho=rho,
        c0=output_matrix(p),
        eta_x_bound=disturbance_bounds(p, lc),
        eta_y_bound=np.asarray(p.sensor_noise, dtype=float),
        dt=p.dt,
        x_eq=x_eq,
        u_eq=op.u_eq,
        y_eq=op.y_eq,
    )


def step_plant(model: PlantModel, x_dev, u, eta_x=None, eta_y=None, step_index: int = 0):
    """Advance any PlantModel one step; returns (next deviation state, outputs).

    Outputs are deviation outputs ``C0 x + eta_y``; callers with a configured
    equilibrium add ``y_eq`` for physical values.  Raises NumericError when
    the state or input is not finite.
    """
    x_dev = np.asarray(x_dev, dtype=float)
    u = np.asarray(u, dtype=float)
    if not (np.all(np.isfinite(x_dev)) and np.all(np.isfinite(u))):
        raise NumericError(f"non-finite state or input at step {step_index}")
    x_next = model.a0 @ x_dev + model.rho(x_dev, u)
    if eta_x is not None:
        x_next = x_next + eta_x
    y = model.c0 @ x_dev
    if eta_y is not None:
        y = y + eta_y
    if not np.all(np.isfinite(x_next)):
        raise NumericError(f"non-finite state produced at step {step_index}")
    return x_next, y
