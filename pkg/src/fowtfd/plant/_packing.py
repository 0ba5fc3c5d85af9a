"""Parameter-vector layout shared by the compiled and pure-Python engines.

Both engines unpack the same flat double vector, so this module is the
single source of truth for the ordering.
"""

from __future__ import annotations

import numpy as np

from .equilibrium import OperatingPoint
from .params import IDX_TOWER, LoadCase, PlantParams

PAR_NAMES = (
    "dt",
    # aerodynamics
    "rho_air", "rotor_area", "rotor_radius",
    "cp_c1", "cp_c2", "cp_c3", "cp_c4", "cp_c5", "cp_c6",
    "ct_lin", "ct_pitch", "ct_min", "ct_max",
    "blade_stiffness", "blade_torque_loss", "blade_thrust_loss",
    # drivetrain
    "gear_ratio", "rotor_inertia", "gen_inertia", "shaft_damping",
    # platform, mooring, tower
    "surge_mass", "surge_damping",
    "moor_k_inner", "moor_k_outer", "moor_knee", "moor_relax_time",
    "pitch_inertia", "pitch_stiffness", "pitch_damping", "thrust_arm",
    "tower_mass", "tower_stiffness", "tower_damping", "hub_height",
    # actuators
    "pitch_act_omega", "pitch_act_zeta", "pitch_min", "pitch_max",
    "torque_act_tau", "torque_min", "torque_max",
    # controller
    "ctrl_pitch_kp", "ctrl_pitch_ki", "ctrl_int_limit",
    "rated_gen_speed", "rated_torque", "torque_law_gain",
    "pitch_feedforward", "torque_feedforward", "open_loop", "pitch_loop_on",
    # output map
    "power_gain", "rated_power", "bend_gain", "bend_aux_gain",
    "bend_aux_pitch_gain", "tower_defl_eq", "mean_wind",
    # mooring fault effects
    "fairlead_km_scale", "fairlead_neutral_shift",
    "fairlead_tower_m_scale", "fairlead_tower_d_scale",
    "anchor_shift_per_length", "anchor_tower_m_scale", "anchor_tower_d_scale",
)

PAR_INDEX = {name: i for i, name in enumerate(PAR_NAMES)}
N_PAR = len(PAR_NAMES)


def pack_params(p: PlantParams, lc: LoadCase, op: OperatingPoint,
                open_loop: bool = False) -> np.ndarray:
    par = np.empty(N_PAR)

    def put(name, value):
        par[PAR_INDEX[name]] = value

    for name in PAR_NAMES:
        value = getattr(p, name, None)
        if isinstance(value, (int, float)):
            put(name, value)
    put("rotor_area", p.rotor_area)
    put("tower_stiffness", p.tower_stiffness)
    put("tower_damping", p.tower_damping)
    put("rated_gen_speed", p.rated_gen_speed)
    put("rated_torque", p.rated_torque)
    put("torque_law_gain", p.torque_law_gain)
    put("pitch_feedforward", op.u_eq[0])
    put("torque_feedforward", op.u_eq[1])
    put("open_loop", 1.0 if open_loop else 0.0)
    put("pitch_loop_on", 1.0 if op.above_rated else 0.0)
    put("power_gain", p.power_gain)
    put("tower_defl_eq", op.x_eq[IDX_TOWER])
    put("mean_wind", lc.u_m)
    # The pitch regulator is gain-scheduled per operating point: the loop is
    # detuned as the working pitch grows, where the aerodynamic surface is
    # proportionally much more sensitive.
    gs = 1.0 / (1.0 + op.u_eq[0] / 0.1)
    par[PAR_INDEX["ctrl_pitch_kp"]] *= gs
    par[PAR_INDEX["ctrl_pitch_ki"]] *= gs
    return par
