"""Physical parameters of the surrogate 10 MW floating-turbine plant.

All values are desk-scale surrogates chosen to reproduce the qualitative
behaviour of a large spar-type floating turbine (platform periods of tens of
seconds, a lightly damped tower fore-aft mode near 0.5 Hz, rated power of
10 MW at 9.6 rpm rotor speed).  They are documented configuration, not
identified quantities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

TWO_PI = 2.0 * math.pi

# State vector layout (12 states).
IDX_SURGE = 0        # platform surge position (m)
IDX_SURGE_VEL = 1    # platform surge velocity (m/s)
IDX_PITCH = 2        # platform pitch angle (rad)
IDX_PITCH_VEL = 3    # platform pitch rate (rad/s)
IDX_TOWER = 4        # tower-top fore-aft modal deflection (m)
IDX_TOWER_VEL = 5    # tower-top fore-aft modal velocity (m/s)
IDX_ROTOR = 6        # rotor speed (rad/s)
IDX_GEN = 7          # generator speed (rad/s, high-speed shaft)
IDX_BLADE = 8        # collective blade-pitch actuator angle (rad)
IDX_BLADE_VEL = 9    # blade-pitch actuator rate (rad/s)
IDX_TORQUE = 10      # delivered generator torque (N m, high-speed shaft)
IDX_MOOR = 11        # slow mooring neutral-point offset (m)
N_STATES = 12

# Output channel layout (10 channels; tower-top acceleration last).
CH_PITCH_1 = 0
CH_PITCH_2 = 1
CH_PITCH_3 = 2
CH_TORQUE = 3
CH_ROTOR = 4
CH_GEN = 5
CH_POWER = 6
CH_BEND = 7       # symmetric (collective) blade-root bending moment
CH_BEND_AUX = 8   # auxiliary fixed-frame bending channel
CH_ACCEL = 9      # tower-top acceleration
N_OUTPUTS = 10
N_INPUTS = 2

OUTPUT_NAMES = (
    "pitch1", "pitch2", "pitch3", "gen_torque", "rotor_speed",
    "gen_speed", "gen_power", "bend_moment", "bend_aux", "tower_accel",
)

# Channels evaluated by the model-based detector, in the order used
# throughout the diagnosis layer (the collective pitch measurement is the
# mean of the three pitch sensors).
MONITORED_NAMES = (
    "gen_speed", "gen_power", "bend_moment", "rotor_speed", "pitch", "gen_torque",
)
N_MONITORED = 6


@dataclass(frozen=True)
class LoadCase:
    """One environmental condition: mean wind plus a sea state."""

    id: int
    wind_kind: str            # "laminar" or "turbulent"
    u_m: float                # mean hub-height wind speed (m/s)
    hs: float                 # significant wave height (m)
    tp: float                 # peak-spectral wave period (s)
    turbulence_intensity: float  # std(U_f)/U_m, 0 for laminar

    def __post_init__(self):
        if self.wind_kind not in ("laminar", "turbulent"):
            raise ValueError(f"unknown wind kind {self.wind_kind!r}")
        if self.wind_kind == "laminar" and self.turbulence_intensity != 0.0:
            raise ValueError("laminar load case must have zero turbulence intensity")


# The seven built-in cases.  Mean wind, H_s and T_p follow the benchmark
# definition; the turbulence intensities are surrogate values (the benchmark
# only distinguishes laminar from turbulent wind).
LOAD_CASES = {
    1: LoadCase(1, "laminar", 12.0, 2.66, 7.42, 0.0),
    2: LoadCase(2, "laminar", 16.0, 3.78, 7.80, 0.0),
    3: LoadCase(3, "laminar", 20.0, 5.13, 8.47, 0.0),
    4: LoadCase(4, "turbulent", 12.0, 2.66, 7.42, 0.035),
    5: LoadCase(5, "turbulent", 16.0, 3.78, 7.80, 0.035),
    6: LoadCase(6, "turbulent", 20.0, 5.13, 8.47, 0.028),
    7: LoadCase(7, "laminar", 8.0, 1.69, 7.28, 0.0),
}


def get_load_case(lc_id: int) -> LoadCase:
    try:
        return LOAD_CASES[int(lc_id)]
    except (KeyError, ValueError, TypeError):
        raise ConfigurationError(f"unknown load case id {lc_id!r}; valid ids are 1..7") from None


class ConfigurationError(ValueError):
    """Raised for invalid scenario or model configuration."""


class NumericError(RuntimeError):
    """Raised when the simulation or an estimator produces non-finite values."""


@dataclass(frozen=True)
class PlantParams:
    """Constants of the surrogate plant, its actuators and its controller."""

    dt: float = 0.01                    # simulation step (s)

    # Rotor / aerodynamics
    rho_air: float = 1.225
    rotor_radius: float = 89.15
    rated_power: float = 10.0e6
    rated_rotor_speed: float = 9.6 * TWO_PI / 60.0   # rad/s
    rated_wind: float = 11.4
    # Power-coefficient surface constants (Heier-style analytic surface).
    cp_c1: float = 0.5176
    cp_c2: float = 116.0
    cp_c3: float = 0.4
    cp_c4: float = 5.0
    cp_c5: float = 21.0
    cp_c6: float = 0.0068
    # Thrust-coefficient surrogate: ct_lin * lambda * exp(-ct_pitch * theta_deg)
    ct_lin: float = 0.10
    ct_pitch: float = 0.09
    ct_min: float = 0.02
    ct_max: float = 1.4

    # Blade flap compliance: quasi-static tip deflection per blade is
    # thrust/(3 k_blade); the deflection feeds back into torque and thrust.
    blade_stiffness: float = 1.8e5      # N/m of tip deflection, per blade
    blade_torque_loss: float = 2.5      # torque knock-down per unit (defl/R)
    blade_thrust_loss: float = 4.0      # thrust knock-down per unit (defl/R)

    # Drivetrain (damping-coupled two-inertia surrogate)
    gear_ratio: float = 50.0
    rotor_inertia: float = 1.6e8        # kg m^2, low-speed shaft
    gen_inertia: float = 5.0e3          # kg m^2, high-speed shaft
    shaft_damping: float = 1.0e9        # N m s/rad on the low-speed shaft

    # Platform surge
    surge_mass: float = 3.2e7           # kg, includes added mass
    surge_damping: float = 8.0e5        # N s/m, hull drag plus mooring drag
    # Piecewise-linear mooring restoring force: inner stiffness up to the
    # knee displacement, stiffer beyond it.
    moor_k_inner: float = 1.2e5         # N/m
    moor_k_outer: float = 4.8e5         # N/m
    moor_knee: float = 20.0             # m
    moor_relax_time: float = 120.0      # s, neutral-point relaxation

    # Platform pitch (hydrostatic restoring dominates)
    pitch_inertia: float = 9.0e10       # kg m^2
    pitch_stiffness: float = 4.0e9      # N m/rad
    pitch_damping: float = 2.0e9        # N m s/rad
    thrust_arm: float = 150.0           # m, thrust moment arm about the CM

    # Tower first fore-aft mode (modal coordinates at tower top)
    tower_mass: float = 4.0e5           # kg modal mass
    tower_freq_hz: float = 0.50
    tower_zeta: float = 0.02
    hub_height: float = 119.0

    # Actuators
    pitch_act_omega: float = 5.0        # rad/s
    pitch_act_zeta: float = 0.7
    pitch_min: float = -0.05            # rad, command saturation (small negative fine-pitch authority)
    pitch_max: float = 1.2
    torque_act_tau: float = 0.1         # s
    torque_min: float = 0.0
    torque_max: float = 2.6e5           # N m, high-speed shaft

    # Controller: PI collective pitch regulating generator speed (riding its
    # lower saturation below rated) and a quadratic torque-tracking law
    # capped at rated torque.
    ctrl_pitch_kp: float = 0.06         # rad per rad/s of generator-speed error
    ctrl_pitch_ki: float = 0.012        # rad per rad of integrated error
    ctrl_int_limit: float = 40.0        # rad s, anti-windup clamp
    fine_pitch: float = 0.0
    torque_law_margin: float = 0.98     # quadratic tracking law, capped at rated torque at +1% overspeed

    # Output map constants
    gen_efficiency: float = 1.0
    bend_gain: float = 5.0e7            # N m per m of tower deflection
    bend_aux_gain: float = 1.5e7
    bend_aux_pitch_gain: float = 2.0e8  # N m per rad of platform pitch

    # Stochastic environment (all folded into the bounded disturbance
    # channels; see wind.py).
    wave_force_per_hs: float = 3.5e4    # N of surge wave force RMS per m of H_s
    wave_tower_frac: float = 0.10       # fraction of wave force entering the tower mode
    wave_pitch_arm: float = 40.0        # m, wave force moment arm for platform pitch
    wave_rel_bandwidth: float = 0.35
    tower_force_noise: float = 3.0e4    # N RMS broadband tower-mode excitation
    surge_force_noise: float = 5.0e3    # N RMS
    pitch_moment_noise: float = 2.0e5   # N m RMS
    rotor_torque_noise: float = 2.0e4   # N m RMS on the low-speed shaft
    noise_clip_sigmas: float = 4.0      # disturbances are clipped here -> hard bound
    turbulence_length: float = 150.0    # m, wind coherence length
    turbulence_clip_sigmas: float = 3.5

    # Sensor noise envelopes (uniform in [-e, e]) per output channel.
    sensor_noise: tuple = (
        1.0e-3, 1.0e-3, 1.0e-3,   # pitch sensors (rad)
        8.0e2,                    # torque (N m)
        2.0e-3,                   # rotor speed (rad/s)
        6.0e-2,                   # generator speed (rad/s)
        4.0e4,                    # power (W)
        2.5e5,                    # bending moment (N m)
        2.5e5,                    # auxiliary bending channel (N m)
        8.0e-3,                   # tower-top acceleration (m/s^2)
    )

    # Mooring-fault signatures.  A fairlead loss removes the upwind line:
    # surge stiffness drops, the neutral point shifts downwind, and the
    # slack line swinging with the platform adds effective modal mass to the
    # coupled fore-aft mode (its frequency drops).  An anchor drag adds
    # unstretched length: the platform drifts until the remaining lines pull
    # taut, which tightens the coupled mode (frequency rises).  Effective
    # modal-mass changes leave static deflections untouched.
    fairlead_km_scale: float = 2.0 / 3.0
    fairlead_neutral_shift: float = 8.0    # m
    fairlead_tower_m_scale: float = 1.40
    fairlead_tower_d_scale: float = 0.85
    anchor_shift_per_length: float = 0.15  # m of neutral shift per m of slack
    anchor_tower_m_scale: float = 0.72
    anchor_tower_d_scale: float = 0.90

    # Derived quantities -------------------------------------------------
    @property
    def rotor_area(self) -> float:
        return math.pi * self.rotor_radius**2

    @property
    def rated_gen_speed(self) -> float:
        return self.rated_rotor_speed * self.gear_ratio

    @property
    def rated_torque(self) -> float:
        return self.rated_power / (self.gen_efficiency * self.rated_gen_speed)

    @property
    def power_gain(self) -> float:
        """Generator power output coefficient (W per rad/s of gen speed)."""
        return self.rated_power / self.rated_gen_speed

    @property
    def tower_stiffness(self) -> float:
        return self.tower_mass * (TWO_PI * self.tower_freq_hz) ** 2

    @property
    def tower_damping(self) -> float:
        return 2.0 * self.tower_zeta * self.tower_mass * TWO_PI * self.tower_freq_hz

    @property
    def torque_law_gain(self) -> float:
        """Quadratic torque-law gain: T_cmd = min(rated, K * gen_speed^2)."""
        return self.torque_law_margin * self.rated_torque / self.rated_gen_speed**2

    def opt_torque_gain(self) -> float:
        """Optimal tip-speed-ratio tracking gain (reference value)."""
        lam_opt, cp_opt = self.cp_peak()
        return (0.5 * self.rho_air * self.rotor_area * self.rotor_radius**3 * cp_opt
                / (lam_opt**3 * self.gear_ratio**3))

    def cp_peak(self) -> tuple[float, float]:
        """(tip-speed ratio, value) of the fine-pitch power-coefficient peak."""
        from . import aero

        best = (0.0, 0.0)
        lam = 2.0
        while lam <= 14.0:
            cp = aero.power_coeff(self, lam, 0.0)
            if cp > best[1]:
                best = (lam, cp)
            lam += 0.01
        return best


DEFAULT_PARAMS = PlantParams()


def with_overrides(params: PlantParams = DEFAULT_PARAMS, **kw) -> PlantParams:
    return replace(params, **kw)
