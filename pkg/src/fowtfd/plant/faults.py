"""Fault catalogue of the benchmark: 11 injectable faults.

Six sensor faults (f1-f4, f7, f8), two actuator faults (f5, f6) and three
structural faults (f9 blade stiffness, f10 fairlead loss, f11 anchor drag).
Magnitudes are stored in SI units; every fault carries a step activation
profile [t_start, t_end).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import (
    CH_BEND, CH_GEN, CH_PITCH_1, CH_PITCH_2, CH_PITCH_3, CH_POWER, CH_ROTOR,
    CH_TORQUE, ConfigurationError, PlantParams,
)

SENSOR_FAULTS = ("f1", "f2", "f3", "f4", "f7", "f8")
ACTUATOR_FAULTS = ("f5", "f6")
STRUCTURAL_FAULTS = ("f9", "f10", "f11")
ALL_FAULTS = SENSOR_FAULTS + ACTUATOR_FAULTS + STRUCTURAL_FAULTS

FAULT_KINDS = {
    "f1": "scaling", "f2": "scaling", "f3": "offset", "f4": "scaling",
    "f5": "stuck", "f6": "offset", "f7": "stuck", "f8": "scaling",
    "f9": "parameter", "f10": "parameter", "f11": "parameter",
}

# Output channel hit by each sensor fault (f7 hits all three pitch sensors).
SENSOR_CHANNEL = {
    "f1": CH_GEN,
    "f2": CH_POWER,
    "f3": CH_BEND,
    "f4": CH_ROTOR,
    "f7": (CH_PITCH_1, CH_PITCH_2, CH_PITCH_3),
    "f8": CH_TORQUE,
}

FAULT_DESCRIPTION = {
    "f1": "generator speed sensor scaling",
    "f2": "generator power sensor scaling",
    "f3": "blade-root bending moment sensor offset",
    "f4": "rotor speed sensor scaling",
    "f5": "stuck pitch actuator",
    "f6": "generator torque actuator offset",
    "f7": "stuck pitch sensor",
    "f8": "generator torque sensor scaling",
    "f9": "sudden rotor blade stiffness loss",
    "f10": "mooring line fairlead failure",
    "f11": "mooring line anchor drag",
}


@dataclass(frozen=True)
class FaultSpec:
    """One fault instance with magnitude and activation window."""

    id: str
    magnitude: float
    t_start: float
    t_end: float = math.inf

    def __post_init__(self):
        if self.id not in ALL_FAULTS:
            raise ConfigurationError(f"unknown fault id {self.id!r}")
        if not (self.t_end > self.t_start >= 0.0):
            raise ConfigurationError(
                f"{self.id}: need 0 <= t_start < t_end, got [{self.t_start}, {self.t_end})")
        if self.kind == "scaling" and self.magnitude <= 0.0:
            raise ConfigurationError(f"{self.id}: scaling gain must be positive")
        if self.id == "f9" and not (0.0 <= self.magnitude < 1.0):
            raise ConfigurationError("f9: blade stiffness scale factor must be in [0, 1)")
        if self.id == "f11" and self.magnitude <= 0.0:
            raise ConfigurationError("f11: added unstretched length must be positive")

    @property
    def kind(self) -> str:
        return FAULT_KINDS[self.id]

    def active(self, t: float) -> bool:
        return self.t_start <= t < self.t_end


# Fault-case presets of the benchmark scenario schedule.  Offsets are stored
# in SI units (1e4 kN m -> 1e7 N m, 20 kN m -> 2e4 N m).
def preset_faults(name: str) -> list[FaultSpec]:
    name = name.upper()
    if name == "A":
        return [
            FaultSpec("f1", 0.95, 210.0, 235.0),
            FaultSpec("f2", 1.1, 305.0, 330.0),
            FaultSpec("f3", 1.0e7, 400.0, 425.0),
            FaultSpec("f4", 1.1, 495.0, 520.0),
            FaultSpec("f5", 0.2, 590.0, 615.0),
            FaultSpec("f6", 2.0e4, 685.0, 710.0),
            FaultSpec("f7", 0.2, 780.0, 805.0),
            FaultSpec("f8", 0.9, 875.0, 900.0),
            FaultSpec("f9", 0.2, 970.0, 1000.0),
        ]
    if name == "B":
        return [FaultSpec("f10", 0.0, 300.0, 1000.0)]
    if name == "C":
        return [FaultSpec("f11", 150.0, 300.0, 1000.0)]
    raise ConfigurationError(f"unknown fault preset {name!r}; use A, B or C")


def validate_fault_list(faults: list[FaultSpec]) -> None:
    """Reject overlapping process faults acting on the same channel."""
    process = [f for f in faults if f.kind in ("stuck", "offset", "parameter")
               or f.id in ACTUATOR_FAULTS + STRUCTURAL_FAULTS]
    process = [f for f in faults if f.id in ACTUATOR_FAULTS + STRUCTURAL_FAULTS]
    for i, a in enumerate(process):
        for b in process[i + 1:]:
            same_channel = (a.id == b.id) or ({a.id, b.id} <= {"f10", "f11"}) \
                or ({a.id, b.id} <= set(ACTUATOR_FAULTS) and a.id == b.id)
            if same_channel and a.t_start < b.t_end and b.t_start < a.t_end:
                raise ConfigurationError(
                    f"overlapping process faults {a.id} and {b.id} on the same channel")
    seen: dict[object, list[FaultSpec]] = {}
    for f in faults:
        if f.id in SENSOR_FAULTS:
            ch = SENSOR_CHANNEL[f.id]
            for g in seen.get(ch, []):
                if f.t_start < g.t_end and g.t_start < f.t_end:
                    raise ConfigurationError(
                        f"overlapping sensor faults {g.id} and {f.id} on channel {ch}")
            seen.setdefault(ch, []).append(f)


def apply_sensor_fault(y_nominal: np.ndarray, fault: FaultSpec, active: bool) -> np.ndarray:
    """Apply one sensor fault to a clean (noise-free) output vector.

    Scaling faults multiply their channel; the bending offset adds its
    magnitude; the stuck pitch sensor replaces all three pitch channels with
    the stuck value.  Inactive faults are the identity.
    """
    if fault.id not in SENSOR_FAULTS:
        raise ConfigurationError(f"{fault.id} is not a sensor fault")
    y = np.array(y_nominal, dtype=float, copy=True)
    if not active:
        return y
    ch = SENSOR_CHANNEL[fault.id]
    if fault.kind == "scaling":
        y[ch] *= fault.magnitude
    elif fault.id == "f3":
        y[ch] += fault.magnitude
    else:  # f7: stuck (noise-free) pitch sensors
        for c in ch:
            y[c] = fault.magnitude
    return y


@dataclass(frozen=True)
class StructuralEffect:
    """Parameter perturbation produced by one structural fault.

    ``blade_scale`` multiplies the blade stiffness; ``moor_k_scale`` the
    mooring restoring curve; ``neutral_shift`` translates the mooring
    neutral point.  The tower scales act on the coupled platform/tower
    fore-aft mode: the effective modal mass shifts the mode frequency
    without moving the static deflection, which keeps mooring faults out of
    reach of the output-mean monitors.
    """

    blade_scale: float = 1.0
    moor_k_scale: float = 1.0
    neutral_shift: float = 0.0
    tower_m_scale: float = 1.0
    tower_d_scale: float = 1.0

    def combine(self, other: "StructuralEffect") -> "StructuralEffect":
        return StructuralEffect(
            blade_scale=self.blade_scale * other.blade_scale,
            moor_k_scale=self.moor_k_scale * other.moor_k_scale,
            neutral_shift=self.neutral_shift + other.neutral_shift,
            tower_m_scale=self.tower_m_scale * other.tower_m_scale,
            tower_d_scale=self.tower_d_scale * other.tower_d_scale,
        )


HEALTHY_EFFECT = StructuralEffect()


def structural_effect(params: PlantParams, fault: FaultSpec) -> StructuralEffect:
    if fault.id == "f9":
        return StructuralEffect(blade_scale=fault.magnitude)
    if fault.id == "f10":
        return StructuralEffect(
            moor_k_scale=params.fairlead_km_scale,
            neutral_shift=params.fairlead_neutral_shift,
            tower_m_scale=params.fairlead_tower_m_scale,
            tower_d_scale=params.fairlead_tower_d_scale,
        )
    if fault.id == "f11":
        return StructuralEffect(
            neutral_shift=params.anchor_shift_per_length * fault.magnitude,
            tower_m_scale=params.anchor_tower_m_scale,
            tower_d_scale=params.anchor_tower_d_scale,
        )
    raise ConfigurationError(f"{fault.id} is not a structural fault")


def configure_structural_fault(params: PlantParams, fault: FaultSpec):
    """Return the parameter-perturbed nonlinear map for a structural fault.

    The result exposes ``effect`` (the parameter perturbation), ``rho`` (the
    perturbed nonlinear state-increment map) and ``delta_rho`` (the pointwise
    difference from the healthy map), the latter for test instrumentation.
    """
    from .model import nonlinear_increment

    effect = structural_effect(params, fault)

    class _Perturbed:
        def __init__(self):
            self.effect = effect

        def rho(self, x, u, lc, x_eq=None):
            return nonlinear_increment(params, x, u, lc, effect, x_eq=x_eq)

        def delta_rho(self, x, u, lc, x_eq=None):
            faulty = nonlinear_increment(params, x, u, lc, effect, x_eq=x_eq)
            healthy = nonlinear_increment(params, x, u, lc, HEALTHY_EFFECT, x_eq=x_eq)
            return faulty - healthy

    return _Perturbed()
