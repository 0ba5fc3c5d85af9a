"""Detection observer with a time-varying residual threshold.

The always-on estimator predicts the six monitored channels from the
commands through the identified model with output-injection feedback.  Its
residual is compared against a per-channel threshold built from a certified
output decay bound (gain/decay pair), per-step evaluations of the model
mismatch and process-disturbance bound, and the measurement-noise
envelopes.  The threshold admits an exact O(1) recursive evaluation, which
direct summation tests verify.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import solve_discrete_are
from scipy.signal import place_poles

from ..plant.params import ConfigurationError, NumericError
from ..sysid.subspace import IdentifiedModel


@dataclass
class ObserverModel:
    """Identified model plus observer gains and threshold constants.

    Two output-injection designs share the model: a tight tracking gain for
    detection, and a deliberately weak gain for the isolation bank so the
    hypothesis parameters, not the state correction, explain a fault.
    """

    model: IdentifiedModel
    gain_l: np.ndarray             # n x M output-injection gain (detection)
    alpha: np.ndarray              # per-output bound gain
    delta: np.ndarray              # per-output bound decay, in (0, 1)
    eta_y_bar: np.ndarray          # per-output measurement-noise bound
    fie_gain_l: np.ndarray = None  # weak gain used by the isolation bank
    fie_alpha: np.ndarray = None
    fie_delta: np.ndarray = None
    bound_w0: float = 0.0          # constant part of the mismatch bound
    bound_w1: float = 0.0          # deviation-proportional part
    fie_bound_w0: float = 0.0      # mismatch bound of the isolation bank
    fie_bound_w1: float = 0.0
    eps_x0: float = 0.5            # initial state-error bound

    @property
    def n_states(self) -> int:
        return self.model.order

    @property
    def n_outputs(self) -> int:
        return self.model.c.shape[0]

    @property
    def a_closed(self) -> np.ndarray:
        return self.model.a - self.gain_l @ self.model.c

    def mismatch_bound(self, u_dev: np.ndarray) -> float:
        """Per-step bound on unmodeled dynamics plus process disturbance.

        Grows with command activity: the linearization error scales with
        the excursion from the identification operating point.  Command
        deviations, unlike output deviations, cannot be inflated by a
        faulty sensor channel masking its own evidence.
        """
        return self.bound_w0 + self.bound_w1 * float(np.linalg.norm(u_dev))

    def fie_mismatch_bound(self, u_dev: np.ndarray) -> float:
        return self.fie_bound_w0 + self.fie_bound_w1 * float(np.linalg.norm(u_dev))

    def normalize(self, u: np.ndarray, y_monitored: np.ndarray):
        m = self.model
        return ((np.atleast_2d(y_monitored) - m.y_op) / m.y_scale,
                (np.atleast_2d(u) - m.u_op) / m.u_scale)


def kalman_observer_gain(a: np.ndarray, c: np.ndarray, noise_env: np.ndarray,
                         q_weight: float = 0.01) -> np.ndarray:
    """Riccati output-injection gain weighted by the sensor-noise envelopes.

    Predictor form: x(k+1) = A x + B u + L (y - C x - D u).  Radial pole
    placement was tried first and rejected: forcing every pole inward needs
    gains that amplify measurement noise far above the signal level.
    """
    r = np.diag(np.maximum(np.asarray(noise_env, dtype=float), 0.02) ** 2)
    q = q_weight * np.eye(a.shape[0])
    p_are = solve_discrete_are(a.T, c.T, q, r)
    return a @ p_are @ c.T @ np.linalg.inv(c @ p_are @ c.T + r)


def place_observer_gain(a: np.ndarray, c: np.ndarray, shrink: float = 0.7) -> np.ndarray:
    """Output-injection gain moving each pole to ``shrink`` times its radius."""
    eigvals = np.linalg.eigvals(a)
    target = shrink * eigvals
    # place_poles refuses repeated poles; spread any collisions slightly.
    for i in range(len(target)):
        while np.sum(np.isclose(target, target[i], atol=1e-9)) > 1:
            target[i] *= 0.995
    res = place_poles(a.T, c.T, sorted_complex_conjugates(target))
    return res.gain_matrix.T


def sorted_complex_conjugates(poles: np.ndarray) -> np.ndarray:
    """Order poles so conjugate pairs are adjacent (place_poles requirement)."""
    poles = np.asarray(poles, dtype=complex)
    real = sorted(p.real for p in poles if abs(p.imag) < 1e-12)
    pairs = []
    seen = np.zeros(len(poles), bool)
    for i, p in enumerate(poles):
        if abs(p.imag) < 1e-12 or seen[i]:
            continue
        for j in range(i + 1, len(poles)):
            if not seen[j] and np.isclose(poles[j], np.conj(p)):
                pairs += [p, np.conj(p)]
                seen[i] = seen[j] = True
                break
    return np.array(real + pairs)


def certify_decay(a_closed: np.ndarray, c: np.ndarray, horizon: int = 1000,
                  margin: float = 0.02) -> tuple[np.ndarray, np.ndarray]:
    """Certified (gain, decay) pairs with ||C_i A0^k|| <= alpha_i delta_i^k.

    For each output the decay rate is picked from a grid above the
    closed-loop spectral radius to minimize the steady threshold level
    alpha_i / (1 - delta_i); the gains are the numerically certified maxima
    over the horizon.
    """
    rho = float(np.max(np.abs(np.linalg.eigvals(a_closed))))
    lo = min(rho + margin, 0.99)
    m = c.shape[0]
    norms = np.empty((horizon + 1, m))
    p_mat = c.copy()
    for k in range(horizon + 1):
        norms[k] = np.linalg.norm(p_mat, axis=1)
        p_mat = p_mat @ a_closed
    alpha = np.zeros(m)
    delta = np.zeros(m)
    grid = np.unique(np.clip(np.linspace(lo, 0.995, 12), lo, 0.995))
    ks = np.arange(horizon + 1)
    for i in range(m):
        best = None
        for d in grid:
            a_i = float(np.max(norms[:, i] / d**ks))
            level = a_i / (1.0 - d)
            if best is None or level < best[0]:
                best = (level, a_i, d)
        _, alpha[i], delta[i] = best
    return alpha, delta


def balance_realization(model: IdentifiedModel, gain: np.ndarray,
                        margin: float = 0.01):
    """Similarity transform making the closed-loop map a near-contraction.

    Solves a discrete Lyapunov equation for the closed-loop matrix and
    rescales the state so that ||T A0 T^-1||_2 <= spectral radius + margin,
    removing the non-normal transient growth that would otherwise inflate
    the certified output-decay gains.  Returns (balanced model, balanced
    gain); the output space is untouched.
    """
    from scipy.linalg import solve_discrete_lyapunov, sqrtm

    a0 = model.a - gain @ model.c
    rho = float(np.max(np.abs(np.linalg.eigvals(a0))))
    delta = min(rho + margin, 0.995)
    n = a0.shape[0]
    m_gram = solve_discrete_lyapunov((a0 / delta).T, np.eye(n) / delta**2)
    t = np.real(sqrtm(m_gram))
    t_inv = np.linalg.inv(t)
    bal = IdentifiedModel(
        a=t @ model.a @ t_inv, b=t @ model.b, c=model.c @ t_inv, d=model.d,
        order=model.order, fit=model.fit, dt=model.dt,
        stabilized=model.stabilized, x0=None,
        u_op=model.u_op, y_op=model.y_op,
        u_scale=model.u_scale, y_scale=model.y_scale,
        channels=model.channels, lc_id=model.lc_id,
    )
    return bal, t @ gain, t


class ThresholdAccumulator:
    """O(1) recursive evaluation of the geometric threshold sum.

    Maintains S(k) = sum_{h=h0}^{k-1} delta^(k-1-h) w(h) per output; the
    threshold is alpha * (S(k) + delta^(k-h0) eps0) + eta_y_bar.
    """

    def __init__(self, alpha, delta, eta_y_bar, eps0: float):
        self.alpha = np.asarray(alpha, dtype=float)
        self.delta = np.asarray(delta, dtype=float)
        if np.any(self.delta <= 0.0) or np.any(self.delta >= 1.0):
            raise ConfigurationError("threshold decay rate must be in (0, 1)")
        self.eta_y_bar = np.asarray(eta_y_bar, dtype=float)
        self.eps0 = float(eps0)
        self.s = np.zeros_like(self.alpha)
        self.decay_pow = np.ones_like(self.alpha)

    def value(self) -> np.ndarray:
        return self.alpha * (self.s + self.decay_pow * self.eps0) + self.eta_y_bar

    def advance(self, w: float | np.ndarray) -> None:
        """Fold in the step-k bound evaluation; value() then refers to k+1."""
        self.s = self.delta * self.s + w
        self.decay_pow = self.decay_pow * self.delta


def healthy_threshold(obs: ObserverModel, w_history: Sequence[float], k: int) -> np.ndarray:
    """Direct (non-recursive) threshold at step k from the bound history."""
    if k < 0:
        raise ConfigurationError("k must be nonnegative")
    w = np.asarray(w_history, dtype=float)[:k]
    acc = np.zeros(obs.n_outputs)
    for h in range(k):
        acc += obs.delta ** (k - 1 - h) * w[h]
    return obs.alpha * (acc + obs.delta**k * obs.eps_x0) + obs.eta_y_bar


def fdae_step(obs: ObserverModel, approx, x_est: np.ndarray, u_n: np.ndarray,
              y_n: np.ndarray, detected: bool, step_index: int = 0):
    """One observer step in normalized coordinates.

    Returns (next state estimate, output prediction, residual).  The online
    approximator term joins the state update only after detection.
    """
    m = obs.model
    y_hat = m.c @ x_est + m.d @ u_n
    r = y_n - y_hat
    x_next = m.a @ x_est + m.b @ u_n + obs.gain_l @ r
    if detected and approx is not None:
        x_next = x_next + approx.eval(y_n, u_n)
    if not np.all(np.isfinite(x_next)):
        raise NumericError(f"non-finite state estimate at step {step_index}")
    return x_next, y_hat, r


def detect(residuals: np.ndarray, thresholds: np.ndarray) -> Optional[tuple[int, int]]:
    """First (step, channel) with |residual| above the threshold.

    Ties at the same step report the lowest channel index.
    """
    residuals = np.atleast_2d(residuals)
    thresholds = np.atleast_2d(thresholds)
    over = np.abs(residuals) > thresholds
    hits = np.argwhere(over)
    if hits.size == 0:
        return None
    k = int(hits[:, 0].min())
    ch = int(np.flatnonzero(over[k])[0])
    return k, ch


def design_observer(model: IdentifiedModel, q_weight: float = 0.01,
                    noise_envelopes: Optional[np.ndarray] = None,
                    safety: float = 1.1, fie_noise_inflation: float = 25.0) -> ObserverModel:
    """Assemble the observer: gains, balanced realization, certified decay."""
    if noise_envelopes is None:
        noise_envelopes = default_monitored_noise(model)
    noise_envelopes = np.asarray(noise_envelopes, dtype=float)
    gain = kalman_observer_gain(model.a, model.c, noise_envelopes, q_weight)
    # The isolation bank wants the weakest gain whose closed loop still
    # contracts briskly; otherwise the geometric threshold horizon balloons.
    fie_gain_raw = None
    for inflation in (fie_noise_inflation, 12.0, 6.0, 3.0, 1.0):
        cand = kalman_observer_gain(
            model.a, model.c, np.sqrt(inflation) * noise_envelopes, q_weight)
        rho = float(np.max(np.abs(np.linalg.eigvals(model.a - cand @ model.c))))
        fie_gain_raw = cand
        if rho <= 0.93:
            break
    model, gain, t = balance_realization(model, gain)
    fie_gain = t @ fie_gain_raw
    alpha, delta = certify_decay(model.a - gain @ model.c, model.c)
    fie_alpha, fie_delta = certify_decay(model.a - fie_gain @ model.c, model.c)
    return ObserverModel(model=model, gain_l=gain, alpha=alpha, delta=delta,
                         eta_y_bar=safety * noise_envelopes,
                         fie_gain_l=fie_gain, fie_alpha=fie_alpha,
                         fie_delta=fie_delta)


def default_monitored_noise(model: IdentifiedModel) -> np.ndarray:
    """Declared sensor envelopes mapped to normalized monitored channels."""
    from ..plant.params import PlantParams

    env = np.asarray(PlantParams().sensor_noise)
    monitored = np.array([env[5], env[6], env[7], env[4],
                          env[0], env[3]])
    return monitored / model.y_scale


def calibrate_bounds(obs: ObserverModel, runs: list[tuple[np.ndarray, np.ndarray]],
                     margin: float = 1.3,
                     w1_grid: Sequence[float] = (0.0, 0.005, 0.01, 0.02, 0.05),
                     which: str = "detection") -> None:
    """Fit the per-step mismatch bound on healthy calibration runs.

    ``runs`` holds (u_normalized, y_normalized) arrays.  The bound
    w(k) = w0 + w1 ||u(k)|| is chosen so the threshold covers ``margin``
    times every calibration residual while keeping the mean level small.
    ``which`` selects the detection observer or the isolation-bank design.
    """
    if which == "detection":
        gain, alpha, delta = obs.gain_l, obs.alpha, obs.delta
    else:
        gain, alpha, delta = obs.fie_gain_l, obs.fie_alpha, obs.fie_delta
    best = None
    for w1 in w1_grid:
        w0_needed = 0.0
        sum_g = 0.0
        sum_gm = 0.0
        count = 0
        for u_n, y_n in runs:
            n = len(u_n)
            x = np.zeros(obs.n_states)
            gsum = np.zeros(obs.n_outputs)
            gm = np.zeros(obs.n_outputs)
            dpow = np.ones(obs.n_outputs)
            for k in range(n):
                y_hat = obs.model.c @ x + obs.model.d @ u_n[k]
                r = y_n[k] - y_hat
                req = (margin * np.abs(r) - obs.eta_y_bar) / alpha - dpow * obs.eps_x0
                g_eff = np.where(gsum > 1e-12, gsum, 1e-12)
                w0_needed = max(w0_needed, float(np.max((req - w1 * gm) / g_eff)))
                sum_g += float(np.mean(gsum))
                sum_gm += float(np.mean(gm))
                count += 1
                x = obs.model.a @ x + obs.model.b @ u_n[k] + gain @ r
                m_k = float(np.linalg.norm(u_n[k]))
                gsum = delta * gsum + 1.0
                gm = delta * gm + m_k
                dpow = dpow * delta
        level = (w0_needed * sum_g + w1 * sum_gm) / max(count, 1)
        if best is None or level < best[0]:
            best = (level, w1, w0_needed)
    _, w1, w0 = best
    if which == "detection":
        obs.bound_w1 = w1
        obs.bound_w0 = max(w0, 1e-6)
    else:
        obs.fie_bound_w1 = w1
        obs.fie_bound_w0 = max(w0, 1e-6)
