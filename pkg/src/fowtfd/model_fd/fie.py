"""Bank of fault-matched adaptive estimators for isolation.

One estimator per structured fault hypothesis.  Each carries a scalar
parameter adapted by a normalized projected-gradient law and a per-channel
time-varying threshold; a hypothesis is rejected when any residual
component crosses its threshold, and a fault is isolated once every other
hypothesis has been rejected.

Hypothesis structures (normalized coordinates):
  sensor scaling  - predicted channel gains an extra term theta * (level of
                    the estimated channel);
  sensor offset   - constant regressor on the faulted channel;
  sensor stuck    - the predicted channel is replaced by theta;
  actuator stuck  - the model input is replaced by theta (pitch);
  actuator offset - constant input-direction term (torque).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..plant.params import ConfigurationError
from .observer import ObserverModel, ThresholdAccumulator

# (fault id, kind, monitored channel or input index, parameter domain radius)
# Domains are sized to the benchmark fault class: gain errors to +-20%,
# offsets and stuck levels to roughly 1.5x the catalogued magnitudes.
FIE_CONFIG = (
    ("f1", "scaling", 0, 0.12),
    ("f2", "scaling", 1, 0.12),
    ("f3", "offset", 2, 12.0),
    ("f4", "scaling", 3, 0.12),
    ("f5", "stuck_input", 0, 10.0),
    ("f6", "input_offset", 1, 5.0),
    ("f7", "stuck_sensor", 4, 10.0),
    ("f8", "scaling", 5, 0.12),
)
FIE_IDS = tuple(cfg[0] for cfg in FIE_CONFIG)

# Residual fraction of the domain radius kept in the tightened worst-case
# parameter-error term after the learning transient has decayed.  Actuator
# hypotheses keep a much smaller floor: their regressor direction spans
# several channels, so a loose floor would hide the cross-channel evidence
# against a mismatched hypothesis.
KAPPA_RESIDUAL_FRACTION = {"scaling": 0.05, "offset": 0.05, "stuck_sensor": 0.05,
                           "stuck_input": 0.005, "input_offset": 0.005}

# The learning mismatch of a sensor hypothesis leaks into the other output
# channels through the injection gain; the leak direction is scaled down
# because the domain-radius bound overstates the plausible mismatch.
LEAK_SCALE = 0.3


@dataclass
class FieState:
    """One fault-hypothesis estimator."""

    fault_id: str
    kind: str                     # scaling | offset | stuck_sensor | stuck_input | input_offset
    channel: int                  # monitored channel (sensor) or input index (actuator)
    domain_radius: float
    mu: float = 0.5               # learning rate, in (0, 2)
    eps: float = 1.0e-6           # gain regularizer
    b_bar: float = 1.2            # forgetting base of the threshold learning term
    theta_hat: float = 0.0
    x_est: Optional[np.ndarray] = None
    activated_at: int = -1
    rejected_at: Optional[int] = None
    residual_trace: list = field(default_factory=list)
    threshold_trace: list = field(default_factory=list)
    theta_trace: list = field(default_factory=list)

    def __post_init__(self):
        if not 0.0 < self.mu < 2.0:
            raise ConfigurationError("learning rate must be in (0, 2)")
        if self.eps <= 0.0:
            raise ConfigurationError("gain regularizer must be positive")
        if self.b_bar <= 1.0:
            raise ConfigurationError("forgetting base must exceed 1")

    @property
    def is_sensor(self) -> bool:
        return self.kind in ("scaling", "offset", "stuck_sensor")

    @property
    def kappa(self) -> float:
        """Largest possible parameter error over the centered ball domain."""
        return self.domain_radius + abs(self.theta_hat)

    def kappa_tight(self, steps_since_activation: int) -> float:
        """Tightened worst-case parameter error used by the threshold.

        The worst-case error is taken to decay with the forgetting base as
        the learning law converges, down to a documented residual fraction
        of the domain radius.
        """
        decay = self.b_bar ** (-steps_since_activation)
        return self.kappa * decay + KAPPA_RESIDUAL_FRACTION[self.kind] * self.domain_radius


# Actuator hypotheses act through the state equation, where the one-step
# feedthrough under-normalizes the gradient; they learn at a reduced rate.
KIND_LEARNING_RATE = {"scaling": 0.5, "offset": 0.5, "stuck_sensor": 0.5,
                      "stuck_input": 0.15, "input_offset": 0.15}


def make_bank(**overrides) -> list[FieState]:
    return [FieState(fid, kind, ch, radius,
                     mu=overrides.pop("mu", None) or KIND_LEARNING_RATE[kind],
                     **overrides)
            for fid, kind, ch, radius in FIE_CONFIG]


def project_params(theta: np.ndarray | float, radius: float):
    """Rescale onto the origin-centered ball when the norm exceeds it."""
    arr = np.asarray(theta, dtype=float)
    norm = float(np.linalg.norm(arr))
    if norm <= radius:
        return theta if np.isscalar(theta) else arr
    scaled = arr * (radius / norm)
    return float(scaled) if np.isscalar(theta) or arr.ndim == 0 else scaled


def adaptive_gain(mu: float, eps: float, regressor_gram: float) -> float:
    """Normalized learning gain mu / (eps + ||g C^T||_F^2)."""
    return mu / (eps + regressor_gram)


def _channel_level(obs: ObserverModel, y_hat: np.ndarray, channel: int) -> float:
    """Estimated absolute level of a monitored channel, normalized units."""
    m = obs.model
    return float(y_hat[channel] + m.y_op[channel] / m.y_scale[channel])


def regressor_of(fie: FieState, obs: ObserverModel, x_est: np.ndarray,
                 u_n: np.ndarray) -> float:
    """Hypothesis regressor at the given estimator state (no mutation)."""
    if fie.kind == "scaling":
        y_nominal = obs.model.c @ x_est + obs.model.d @ u_n
        return _channel_level(obs, y_nominal, fie.channel)
    return 1.0


def fie_step(fie: FieState, obs: ObserverModel, u_n: np.ndarray, y_n: np.ndarray):
    """Advance one isolation estimator; returns (y_hat, residual, regressor).

    The regressor is the scalar sensitivity of the hypothesis parameter as
    used by both the learning law and the threshold.
    """
    if fie.x_est is None:
        raise ConfigurationError(f"estimator {fie.fault_id} stepped before activation")
    m = obs.model
    y_nominal = m.c @ fie.x_est + m.d @ u_n

    if fie.kind == "scaling":
        g = _channel_level(obs, y_nominal, fie.channel)
        y_hat = y_nominal.copy()
        y_hat[fie.channel] += fie.theta_hat * g
    elif fie.kind == "offset":
        g = 1.0
        y_hat = y_nominal.copy()
        y_hat[fie.channel] += fie.theta_hat
    elif fie.kind == "stuck_sensor":
        g = 1.0
        y_hat = y_nominal.copy()
        y_hat[fie.channel] = fie.theta_hat
    elif fie.kind == "stuck_input":
        g = 1.0  # input-direction regressor; gram uses ||C b||
        y_hat = y_nominal
    elif fie.kind == "input_offset":
        g = 1.0
        y_hat = y_nominal
    else:
        raise ConfigurationError(f"unknown estimator kind {fie.kind}")

    r = y_n - y_hat
    x_next = m.a @ fie.x_est + m.b @ u_n + obs.fie_gain_l @ r
    if fie.kind == "stuck_input":
        x_next = x_next + m.b[:, fie.channel] * (fie.theta_hat - u_n[fie.channel])
    elif fie.kind == "input_offset":
        x_next = x_next + m.b[:, fie.channel] * fie.theta_hat
    fie.x_est = x_next
    return y_hat, r, g


def update_params(fie: FieState, residual: np.ndarray, regressor: float,
                  c_matrix: np.ndarray, b_matrix: Optional[np.ndarray] = None) -> float:
    """Projected normalized-gradient update of the hypothesis parameter."""
    if fie.is_sensor:
        grad = regressor * float(residual[fie.channel])
        gram = regressor * regressor
    else:
        cb = c_matrix @ b_matrix[:, fie.channel]
        grad = float(cb @ residual)
        gram = float(cb @ cb)
    gamma = adaptive_gain(fie.mu, fie.eps, gram)
    fie.theta_hat = project_params(fie.theta_hat + gamma * grad, fie.domain_radius)
    return fie.theta_hat


class FieThreshold:
    """Recursive per-channel threshold of one isolation estimator."""

    def __init__(self, fie: FieState, obs: ObserverModel, eps_kd: float, k_d: int):
        self.fie = fie
        self.obs = obs
        self.k_d = k_d
        self.steps = 0
        self.acc = ThresholdAccumulator(obs.fie_alpha, obs.fie_delta, obs.eta_y_bar, eps_kd)
        self.forget_pow = 1.0
        if fie.is_sensor:
            # Fault support on its own channel plus the one-step leakage of
            # the learning mismatch through the output-injection gain.
            mask = np.zeros(obs.n_outputs)
            mask[fie.channel] = 1.0
            leak = np.abs(obs.model.c @ obs.fie_gain_l[:, fie.channel])
            self.g_direction = mask + LEAK_SCALE * leak
        else:
            cb = obs.model.c @ obs.model.b[:, fie.channel]
            self.g_direction = np.abs(cb)

    def value(self) -> np.ndarray:
        return self.acc.value()

    def advance(self, w: float, regressor: float) -> None:
        learn = self.g_direction * abs(regressor) * (
            self.fie.kappa_tight(self.steps)
            + abs(self.fie.theta_hat) * self.forget_pow)
        self.acc.advance(w + learn)
        self.forget_pow /= self.fie.b_bar
        self.steps += 1


def fie_threshold(fie: FieState, obs: ObserverModel, k: int, k_d: int,
                  w_history, regressor_history, theta_history,
                  eps_kd: float) -> np.ndarray:
    """Direct summation form of the isolation threshold at step k >= k_d."""
    if k < k_d:
        raise ConfigurationError("threshold queried before activation")
    if fie.is_sensor:
        direction = np.zeros(obs.n_outputs)
        direction[fie.channel] = 1.0
        direction = direction + LEAK_SCALE * np.abs(
            obs.model.c @ obs.fie_gain_l[:, fie.channel])
    else:
        direction = np.abs(obs.model.c @ obs.model.b[:, fie.channel])
    alpha = obs.fie_alpha if obs.fie_alpha is not None else obs.alpha
    delta = obs.fie_delta if obs.fie_delta is not None else obs.delta
    acc = np.zeros(obs.n_outputs)
    for h in range(k_d, k):
        j = h - k_d
        theta_h = abs(theta_history[j])
        kappa_h = ((fie.domain_radius + theta_h) * fie.b_bar ** (-j)
                   + KAPPA_RESIDUAL_FRACTION[fie.kind] * fie.domain_radius)
        learn = direction * abs(regressor_history[j]) * (
            kappa_h + theta_h * fie.b_bar ** (-j))
        acc += delta ** (k - 1 - h) * (w_history[j] + learn)
    return alpha * (acc + delta ** (k - k_d) * eps_kd) + obs.eta_y_bar


def isolate(rejections: dict[str, Optional[int]]) -> tuple[Optional[str], Optional[int], bool]:
    """Apply the all-but-one rule to the rejection map.

    Returns (isolated fault id, isolation step, all_rejected).  The
    isolation step is when the second-to-last rejection landed.  No result
    while two or more hypotheses remain plausible; all rejected means the
    fault is unstructured.
    """
    alive = [fid for fid, rej in rejections.items() if rej is None]
    times = sorted(t for t in rejections.values() if t is not None)
    if len(alive) == 1:
        return alive[0], times[-1] if times else None, False
    if len(alive) == 0:
        return None, times[-1] if times else None, True
    return None, None, False
