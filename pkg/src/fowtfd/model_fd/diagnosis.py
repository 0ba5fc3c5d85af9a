"""Streaming model-based diagnosis: detection, isolation, learning, metrics.

Runs the detection observer over a decimated trace, opens the estimator
bank at the detection instant, applies the all-but-one isolation rule and
re-arms after the plant returns to nominal behaviour.  A shadow copy of the
plain observer (never augmented by the online approximator) supplies the
residual/threshold traces used for detection decisions and for the maximum
residual-to-threshold ratio metric, so the approximator's post-detection
learning cannot mask the metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..plant.engine import Trace
from ..plant.faults import FaultSpec
from ..plant.params import ConfigurationError
from ..sysid.pipeline import FD_DT, monitored_outputs
from .fie import (
    FIE_IDS, FieState, FieThreshold, fie_step, isolate, make_bank,
    regressor_of, update_params,
)
from .observer import ObserverModel, ThresholdAccumulator, fdae_step
from .rbf import RbfApproximator, rbf_eval_update

HOLD_OFF_STEPS = 75          # consecutive quiet samples before re-arming (15 s)
FIE_EPS_FACTOR = 2.0         # activation-time state-error bound inflation
FIE_EPS_FLOOR = 0.5


@dataclass
class DetectionEvent:
    k_d: int
    t_d: float
    channel: int
    isolated: Optional[str] = None
    isolation_step: Optional[int] = None
    unstructured: bool = False
    ended_at: Optional[int] = None
    rejections: dict = field(default_factory=dict)
    theta_raw: dict = field(default_factory=dict)


@dataclass
class ModelFdResult:
    t: np.ndarray
    residuals: np.ndarray          # shadow observer residuals (n, M)
    thresholds: np.ndarray         # matching time-varying thresholds
    events: list
    fie_traces: dict               # fault id -> list of per-event trace dicts
    approx_norm: np.ndarray        # online-approximator output norm per step
    channels: tuple

    def detected(self) -> bool:
        return bool(self.events)


def theta_to_raw(fie: FieState, obs: ObserverModel) -> float:
    """Map a normalized hypothesis parameter back to physical units."""
    m = obs.model
    if fie.kind == "scaling":
        return fie.theta_hat
    if fie.kind == "offset":
        return fie.theta_hat * m.y_scale[fie.channel]
    if fie.kind == "stuck_sensor":
        return fie.theta_hat * m.y_scale[fie.channel] + m.y_op[fie.channel]
    if fie.kind == "stuck_input":
        return fie.theta_hat * m.u_scale[fie.channel] + m.u_op[fie.channel]
    return fie.theta_hat * m.u_scale[fie.channel]


def mrrt(residuals: np.ndarray, thresholds: np.ndarray,
         window: tuple[int, int]) -> float:
    """Maximum |residual|/threshold over a step window, across channels."""
    lo, hi = window
    if hi <= lo:
        raise ConfigurationError("empty evaluation window")
    r = np.atleast_2d(residuals)[lo:hi]
    th = np.atleast_2d(thresholds)[lo:hi]
    if np.any(th <= 0.0):
        raise ConfigurationError("thresholds must be strictly positive")
    return float(np.max(np.abs(r) / th))


def fault_window_steps(fault: FaultSpec, n_steps: int, dt: float = FD_DT) -> tuple[int, int]:
    lo = int(np.ceil(fault.t_start / dt))
    hi = n_steps if not np.isfinite(fault.t_end) else int(np.floor(fault.t_end / dt))
    return max(lo, 0), min(hi, n_steps)


def run_model_fd(trace_dec: Trace, obs: ObserverModel,
                 confirm: int = 1, use_approximator: bool = True,
                 record_fie: bool = True) -> ModelFdResult:
    """Full diagnosis pass over a decimated measurement trace."""
    y_n, u_n = obs.normalize(trace_dec.u, monitored_outputs(trace_dec.y))
    n = len(y_n)
    m_out = obs.n_outputs

    shadow_x = np.zeros(obs.n_states)
    main_x = np.zeros(obs.n_states)
    shadow_acc = ThresholdAccumulator(obs.alpha, obs.delta, obs.eta_y_bar, obs.eps_x0)
    approx = RbfApproximator(n_outputs=obs.n_states) if use_approximator else None

    residuals = np.zeros((n, m_out))
    thresholds = np.zeros((n, m_out))
    approx_norm = np.zeros(n)

    events: list[DetectionEvent] = []
    fie_traces: dict[str, list] = {fid: [] for fid in FIE_IDS}
    mode_detected = False
    event: Optional[DetectionEvent] = None
    bank: list[FieState] = []
    fie_thr: dict[str, FieThreshold] = {}
    consecutive_over = 0
    quiet = 0

    for k in range(n):
        w_k = obs.mismatch_bound(u_n[k])
        thr = shadow_acc.value()
        thresholds[k] = thr

        x_pre = shadow_x
        shadow_x, _, r_s = fdae_step(obs, None, shadow_x, u_n[k], y_n[k], False, k)
        residuals[k] = r_s

        main_x, _, r_m = fdae_step(obs, approx, main_x, u_n[k], y_n[k],
                                   mode_detected, k)
        if mode_detected and approx is not None:
            out, _ = rbf_eval_update(approx, y_n[k], u_n[k], r_m, obs.model.c)
            approx_norm[k] = float(np.linalg.norm(out))

        over = bool(np.any(np.abs(r_s) > thr))

        if not mode_detected:
            consecutive_over = consecutive_over + 1 if over else 0
            if consecutive_over >= confirm:
                k_d = k - confirm + 1
                ch = int(np.flatnonzero(np.abs(residuals[k_d]) > thresholds[k_d])[0])
                mode_detected = True
                event = DetectionEvent(k_d=k_d, t_d=float(trace_dec.t[k_d]), channel=ch)
                eps_kd = FIE_EPS_FACTOR * float(
                    np.max(shadow_acc.s + shadow_acc.decay_pow * obs.eps_x0)) + FIE_EPS_FLOOR
                bank = make_bank()
                fie_thr = {}
                for fie in bank:
                    # Start from the state before the detection-step output
                    # injection pulled it toward the faulty measurement.
                    fie.x_est = x_pre.copy()
                    fie.activated_at = k
                    thr_l = FieThreshold(fie, obs, eps_kd, k)
                    # Priming pass over the detection step: the learning law
                    # sees the activation residual (no rejection is judged
                    # here), and the threshold gains its first learning term
                    # so the k_d+1 comparison carries the full slack.
                    _, r_l, g_l = fie_step(fie, obs, u_n[k], y_n[k])
                    update_params(fie, r_l, g_l, obs.model.c, obs.model.b)
                    thr_l.advance(obs.fie_mismatch_bound(u_n[k]), g_l)
                    fie_thr[fie.fault_id] = thr_l
                quiet = 0
        else:
            # Isolation bank.
            for fie in bank:
                y_hat_l, r_l, g_l = fie_step(fie, obs, u_n[k], y_n[k])
                thr_l = fie_thr[fie.fault_id].value()
                if record_fie:
                    fie.residual_trace.append(r_l.copy())
                    fie.threshold_trace.append(thr_l.copy())
                    fie.theta_trace.append(fie.theta_hat)
                if fie.rejected_at is None and np.any(np.abs(r_l) > thr_l):
                    fie.rejected_at = k
                update_params(fie, r_l, g_l, obs.model.c, obs.model.b)
                fie_thr[fie.fault_id].advance(obs.fie_mismatch_bound(u_n[k]), g_l)
            rejections = {fie.fault_id: fie.rejected_at for fie in bank}
            fid, step, all_rejected = isolate(rejections)
            if event.isolated is None and not event.unstructured:
                if fid is not None:
                    event.isolated = fid
                    event.isolation_step = step
                elif all_rejected:
                    event.unstructured = True
                    event.isolation_step = step
            # Re-arm once the plant looks nominal again.
            quiet = 0 if over else quiet + 1
            if quiet >= HOLD_OFF_STEPS:
                event.ended_at = k
                event.rejections = {fie.fault_id: fie.rejected_at for fie in bank}
                event.theta_raw = {fie.fault_id: theta_to_raw(fie, obs) for fie in bank}
                if record_fie:
                    for fie in bank:
                        fie_traces[fie.fault_id].append({
                            "activated_at": fie.activated_at,
                            "residuals": np.array(fie.residual_trace),
                            "thresholds": np.array(fie.threshold_trace),
                            "theta": np.array(fie.theta_trace),
                        })
                events.append(event)
                event = None
                bank = []
                fie_thr = {}
                mode_detected = False
                consecutive_over = 0
                main_x = shadow_x.copy()
                if approx is not None:
                    approx.reset()

        shadow_acc.advance(w_k)

    if event is not None:
        event.ended_at = n - 1
        event.rejections = {fie.fault_id: fie.rejected_at for fie in bank}
        event.theta_raw = {fie.fault_id: theta_to_raw(fie, obs) for fie in bank}
        if record_fie:
            for fie in bank:
                fie_traces[fie.fault_id].append({
                    "activated_at": fie.activated_at,
                    "residuals": np.array(fie.residual_trace),
                    "thresholds": np.array(fie.threshold_trace),
                    "theta": np.array(fie.theta_trace),
                })
        events.append(event)

    return ModelFdResult(t=trace_dec.t.copy(), residuals=residuals,
                         thresholds=thresholds, events=events,
                         fie_traces=fie_traces, approx_norm=approx_norm,
                         channels=tuple(obs.model.channels))


def mrrt_table(result: ModelFdResult, faults: Sequence[FaultSpec]) -> dict[str, float]:
    """Per-fault maximum residual-to-threshold ratio over each fault window."""
    out = {}
    for f in faults:
        window = fault_window_steps(f, len(result.t))
        out[f.id] = mrrt(result.residuals, result.thresholds, window)
    return out
