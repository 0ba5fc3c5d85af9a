"""Quasi-static rotor aerodynamics of the surrogate plant.

Torque and thrust come from smooth analytic coefficient surfaces in
(tip-speed ratio, collective pitch), with a quasi-static blade-flap
correction: softer blades deflect more under thrust and lose torque and
thrust.  The blade-stiffness scale factor is the lever through which the
sudden rotor-blade fault acts.
"""

from __future__ import annotations

import math

from .params import PlantParams

RAD2DEG = 180.0 / math.pi


def power_coeff(p: PlantParams, lam: float, pitch_deg: float) -> float:
    """Analytic power-coefficient surface, clipped to physical range."""
    if lam <= 0.0:
        return 0.0
    li = 1.0 / (lam + 0.08 * pitch_deg) - 0.035 / (pitch_deg**3 + 1.0)
    if li <= 1e-6:
        return 0.0
    lam_i = 1.0 / li
    cp = p.cp_c1 * (p.cp_c2 / lam_i - p.cp_c3 * pitch_deg - p.cp_c4) * math.exp(-p.cp_c5 / lam_i) \
        + p.cp_c6 * lam
    if cp < 0.0:
        return 0.0
    if cp > 0.593:
        return 0.593
    return cp


def thrust_coeff(p: PlantParams, lam: float, pitch_deg: float) -> float:
    ct = p.ct_lin * lam * math.exp(-p.ct_pitch * pitch_deg)
    if ct < p.ct_min:
        return p.ct_min
    if ct > p.ct_max:
        return p.ct_max
    return ct


def rotor_loads(p: PlantParams, wind: float, rotor_speed: float, pitch: float,
                blade_stiffness_scale: float = 1.0) -> tuple[float, float]:
    """Aerodynamic (torque, thrust) on the low-speed shaft.

    ``wind`` is the rotor-effective relative wind speed; ``pitch`` is the
    collective blade pitch in radians.  ``blade_stiffness_scale`` multiplies
    the nominal blade stiffness (1 = healthy).
    """
    v = wind if wind > 1.0 else 1.0
    wr = rotor_speed if rotor_speed > 0.1 else 0.1
    lam = wr * p.rotor_radius / v
    pitch_deg = pitch * RAD2DEG
    if pitch_deg < -0.5:
        pitch_deg = -0.5
    q = 0.5 * p.rho_air * p.rotor_area * v * v
    thrust0 = q * thrust_coeff(p, lam, pitch_deg)
    torque0 = q * v * power_coeff(p, lam, pitch_deg) / wr
    # Quasi-static flap deflection from the uncorrected thrust.
    defl = thrust0 / (3.0 * p.blade_stiffness * blade_stiffness_scale)
    rel = defl / p.rotor_radius
    q_torque = 1.0 - p.blade_torque_loss * rel
    q_thrust = 1.0 - p.blade_thrust_loss * rel
    if q_torque < 0.0:
        q_torque = 0.0
    if q_thrust < 0.0:
        q_thrust = 0.0
    return torque0 * q_torque, thrust0 * q_thrust
