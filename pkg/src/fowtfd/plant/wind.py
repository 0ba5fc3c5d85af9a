"""Stochastic environment: wind series and bounded disturbance channels.

The wind is the mean load-case speed plus a colored zero-mean fluctuation
(first-order coherence filter, std = turbulence intensity x mean speed).
Wave loads and broadband structural excitation are folded into the bounded
process-disturbance channels; every stochastic draw is clipped to its
declared envelope so the bound invariants hold by construction.

All randomness of a scenario derives from one master seed split into
independent child streams with a fixed rule (wind, waves, process noise,
sensor noise).
"""

from __future__ import annotations

import math

import numpy as np
from scipy import signal

from .params import (
    IDX_PITCH_VEL, IDX_SURGE_VEL, IDX_TOWER_VEL, IDX_ROTOR, IDX_GEN,
    LoadCase, N_OUTPUTS, N_STATES, PlantParams, get_load_case,
)

_STREAMS = ("wind", "wave", "process", "sensor")


def child_rngs(seed: int) -> dict[str, np.random.Generator]:
    """Expand one master seed into the named child streams."""
    seqs = np.random.SeedSequence(int(seed)).spawn(len(_STREAMS))
    return {name: np.random.default_rng(s) for name, s in zip(_STREAMS, seqs)}


def generate_wind(lc: LoadCase | int, seed: int, n: int,
                  params: PlantParams | None = None) -> np.ndarray:
    """Hub-height wind speed series U_m + U_f at the simulation rate."""
    if not isinstance(lc, LoadCase):
        lc = get_load_case(lc)
    if n < 1:
        raise ValueError("n must be >= 1")
    p = params or PlantParams()
    if lc.turbulence_intensity == 0.0:
        return np.full(n, lc.u_m)
    rng = child_rngs(seed)["wind"]
    sigma = lc.turbulence_intensity * lc.u_m
    tau = p.turbulence_length / lc.u_m
    a = math.exp(-p.dt / tau)
    # Stationary AR(1): innovation variance sigma^2 (1 - a^2).
    innov = rng.standard_normal(n) * (sigma * math.sqrt(1.0 - a * a))
    fluct = signal.lfilter([1.0], [1.0, -a], innov,
                           zi=np.array([a * rng.standard_normal() * sigma]))[0]
    np.clip(fluct, -p.turbulence_clip_sigmas * sigma,
            p.turbulence_clip_sigmas * sigma, out=fluct)
    return lc.u_m + fluct


def _band_noise(rng: np.random.Generator, n: int, dt: float, center_hz: float,
                rel_bw: float, sigma: float) -> np.ndarray:
    """Band-limited unit-variance noise scaled to sigma, clipped later."""
    lo = max(center_hz * (1.0 - rel_bw), 1e-3)
    hi = center_hz * (1.0 + rel_bw)
    nyq = 0.5 / dt
    sos = signal.butter(2, [lo / nyq, hi / nyq], btype="bandpass", output="sos")
    x = signal.sosfilt(sos, rng.standard_normal(n))
    std = float(np.std(x))
    if std < 1e-12:
        return np.zeros(n)
    return x * (sigma / std)


def disturbance_bounds(p: PlantParams, lc: LoadCase) -> np.ndarray:
    """Declared per-state envelope of the process-disturbance increments."""
    clip = p.noise_clip_sigmas
    bound = np.zeros(N_STATES)
    wave = p.wave_force_per_hs * lc.hs
    bound[IDX_SURGE_VEL] = clip * p.dt * (p.surge_force_noise + wave) / p.surge_mass
    bound[IDX_PITCH_VEL] = clip * p.dt * (
        p.pitch_moment_noise + wave * p.wave_pitch_arm) / p.pitch_inertia
    bound[IDX_TOWER_VEL] = clip * p.dt * (
        p.tower_force_noise + wave * p.wave_tower_frac) / p.tower_mass
    bound[IDX_ROTOR] = clip * p.dt * p.rotor_torque_noise / p.rotor_inertia
    return bound


def draw_disturbances(p: PlantParams, lc: LoadCase, seed: int, n: int,
                      noise: bool = True) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pre-draw all scenario stochastics: (wind, eta_x, eta_y).

    ``eta_x`` holds per-step state increments (n x 12); ``eta_y`` per-step
    measurement noise (n x 10).  With ``noise=False`` everything stochastic
    is zeroed, including wind fluctuation.
    """
    rngs = child_rngs(seed)
    eta_x = np.zeros((n, N_STATES))
    eta_y = np.zeros((n, N_OUTPUTS))
    if not noise:
        return np.full(n, lc.u_m), eta_x, eta_y

    wind = generate_wind(lc, seed, n, p)

    wave_rng = rngs["wave"]
    sigma_wave = p.wave_force_per_hs * lc.hs
    center = 1.0 / lc.tp
    wave_force = _band_noise(wave_rng, n, p.dt, center, p.wave_rel_bandwidth, sigma_wave)

    proc = rngs["process"]
    surge_noise = proc.standard_normal(n) * p.surge_force_noise
    pitch_noise = proc.standard_normal(n) * p.pitch_moment_noise
    tower_noise = proc.standard_normal(n) * p.tower_force_noise
    rotor_noise = proc.standard_normal(n) * p.rotor_torque_noise

    eta_x[:, IDX_SURGE_VEL] = p.dt * (surge_noise + wave_force) / p.surge_mass
    eta_x[:, IDX_PITCH_VEL] = p.dt * (
        pitch_noise + wave_force * p.wave_pitch_arm) / p.pitch_inertia
    eta_x[:, IDX_TOWER_VEL] = p.dt * (
        tower_noise + wave_force * p.wave_tower_frac) / p.tower_mass
    eta_x[:, IDX_ROTOR] = p.dt * rotor_noise / p.rotor_inertia
    bound = disturbance_bounds(p, lc)
    np.clip(eta_x, -bound, bound, out=eta_x)

    env = np.asarray(p.sensor_noise)
    eta_y[:] = rngs["sensor"].uniform(-1.0, 1.0, size=(n, N_OUTPUTS)) * env
    return wind, eta_x, eta_y
