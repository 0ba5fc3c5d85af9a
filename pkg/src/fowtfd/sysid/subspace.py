"""Past-output MOESP subspace identification and model-quality scoring.

Identifies a discrete-time (A, B, C, D) model from input/output records via
an orthogonal-projection subspace method with past inputs and outputs as
instruments, then recovers B, D and the initial state by linear least
squares on the input-output data equation.  Returned models are always
stable: an unstable raw estimate has its eigenvalues radially contracted
and the result is flagged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import qr, svd


class IdentificationError(RuntimeError):
    pass


class VafError(ValueError):
    pass


@dataclass
class IdentifiedModel:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    order: int
    fit: np.ndarray              # per-output VAF (%) on held-out data
    dt: float
    stabilized: bool = False
    x0: Optional[np.ndarray] = None
    # Operating-point metadata when identified from normalized plant data.
    u_op: Optional[np.ndarray] = None
    y_op: Optional[np.ndarray] = None
    u_scale: Optional[np.ndarray] = None
    y_scale: Optional[np.ndarray] = None
    channels: tuple = ()
    lc_id: int = 0

    @property
    def n_inputs(self) -> int:
        return self.b.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.c.shape[0]

    def spectral_radius(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvals(self.a))))

    def simulate(self, u: np.ndarray, x0: Optional[np.ndarray] = None) -> np.ndarray:
        u = np.atleast_2d(np.asarray(u, dtype=float))
        if u.shape[0] < u.shape[1]:
            u = u.T
        n = len(u)
        x = np.zeros(self.order) if x0 is None else np.asarray(x0, dtype=float).copy()
        y = np.empty((n, self.n_outputs))
        for k in range(n):
            y[k] = self.c @ x + self.d @ u[k]
            x = self.a @ x + self.b @ u[k]
        return y


def vaf(y_true: np.ndarray, y_pred: np.ndarray) -> np.ndarray:
    """Variance accounted for, percent per channel.

    vaf = 100 * (1 - var(y_true - y_pred) / var(y_true)).
    """
    y_true = np.atleast_2d(np.asarray(y_true, dtype=float))
    y_pred = np.atleast_2d(np.asarray(y_pred, dtype=float))
    if y_true.ndim == 2 and y_true.shape[0] == 1:
        y_true, y_pred = y_true.T, y_pred.T
    if y_true.shape != y_pred.shape:
        raise VafError(f"shape mismatch {y_true.shape} vs {y_pred.shape}")
    if y_true.shape[0] < 2:
        raise VafError("need at least 2 samples")
    var_true = np.var(y_true, axis=0)
    bad = np.flatnonzero(var_true <= 0.0)
    if bad.size:
        raise VafError(f"zero-variance true channel(s) {bad.tolist()}: VAF undefined")
    return 100.0 * (1.0 - np.var(y_true - y_pred, axis=0) / var_true)


def _block_hankel(series: np.ndarray, rows: int, cols: int) -> np.ndarray:
    n_sig = series.shape[1]
    H = np.empty((rows * n_sig, cols))
    for i in range(rows):
        H[i * n_sig:(i + 1) * n_sig] = series[i:i + cols].T
    return H


def _stabilize(a: np.ndarray, margin: float = 0.9995) -> tuple[np.ndarray, bool]:
    eigvals, eigvecs = np.linalg.eig(a)
    radius = np.max(np.abs(eigvals))
    if radius < 1.0:
        return a, False
    scaled = eigvals * np.where(np.abs(eigvals) >= margin,
                                margin / np.abs(eigvals), 1.0)
    a_new = np.real(eigvecs @ np.diag(scaled) @ np.linalg.inv(eigvecs))
    return a_new, True


def subspace_identify(u: np.ndarray, y: np.ndarray, order: int, horizon: int = 20,
                      holdout: float = 0.3, dt: float = 0.2) -> IdentifiedModel:
    """Identify a state-space model from sampled input/output data.

    ``u`` is (N, m), ``y`` is (N, p); ``horizon`` is the number of block
    rows.  The trailing ``holdout`` fraction is reserved for the VAF score,
    which is computed from a pure simulation of the identified model.
    """
    u = np.atleast_2d(np.asarray(u, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    if u.shape[0] < u.shape[1]:
        u = u.T
    if y.shape[0] < y.shape[1]:
        y = y.T
    if len(u) != len(y):
        raise IdentificationError("input and output series must have equal length")
    n_total, m = u.shape
    p = y.shape[1]
    if n_total < 10 * horizon * (m + p):
        raise IdentificationError(
            f"need at least {10 * horizon * (m + p)} samples for horizon {horizon}, got {n_total}")
    if not 1 <= order < horizon * p:
        raise IdentificationError(f"order must be in [1, {horizon * p})")

    n_fit = int(round(n_total * (1.0 - holdout)))
    u_fit, y_fit = u[:n_fit], y[:n_fit]

    s = horizon
    cols = n_fit - 2 * s + 1
    U = _block_hankel(u_fit, 2 * s, cols)
    Y = _block_hankel(y_fit, 2 * s, cols)
    u_past, u_future = U[:s * m], U[s * m:]
    y_past, y_future = Y[:s * p], Y[s * p:]

    stacked = np.vstack([u_future, u_past, y_past, y_future])
    _, r = qr(stacked.T, mode="economic")
    L = r.T
    r1 = s * m
    r2 = r1 + s * (m + p)
    L11 = L[:r1, :r1]
    if np.linalg.matrix_rank(L11, tol=1e-8 * abs(L11).max()) < r1:
        raise IdentificationError(
            "rank-deficient future-input Hankel block: excitation is not persistently exciting")
    # Part of the future outputs orthogonal to future inputs, explained by
    # the past-data instruments.
    L32 = L[r2:, r1:r2]
    U1, S1, _ = svd(L32, full_matrices=False)
    if S1[0] <= 0.0 or S1[order - 1] / S1[0] < 1e-12:
        raise IdentificationError(
            f"instrument-projection block is rank deficient at order {order} "
            f"(singular value ratio {S1[order - 1] / S1[0]:.2e})")
    gamma = U1[:, :order] * np.sqrt(S1[:order])

    c = gamma[:p]
    a = np.linalg.lstsq(gamma[:-p], gamma[p:], rcond=None)[0]
    a, stabilized = _stabilize(a)

    b, d, x0 = _estimate_bd(a, c, u_fit, y_fit)
    model = IdentifiedModel(a=a, b=b, c=c, d=d, order=order,
                            fit=np.zeros(p), dt=dt, stabilized=stabilized, x0=x0)

    y_sim = model.simulate(u, x0=x0)
    model.fit = vaf(y[n_fit:], y_sim[n_fit:])
    return model


def _estimate_bd(a: np.ndarray, c: np.ndarray, u: np.ndarray, y: np.ndarray):
    """Least-squares estimate of (B, D, x0) given (A, C) on fit data."""
    n = a.shape[0]
    N, m = u.shape
    p = c.shape[0]
    n_b = n * m
    n_d = p * m
    n_cols = n + n_b + n_d

    # State trajectories of the x0- and B-entry basis responses, advanced
    # jointly: rows 0..n-1 are e_i initial states, rows n.. are B bases.
    basis_states = np.zeros((n + n_b, n))
    basis_states[:n] = np.eye(n)
    reg = np.zeros((N, p, n_cols))
    for k in range(N):
        out = basis_states @ c.T          # (n + n_b, p)
        reg[k, :, :n] = out[:n].T
        reg[k, :, n:n + n_b] = out[n:].T
        for j in range(m):
            reg[k, :, n + n_b + j * p:n + n_b + (j + 1) * p] += np.eye(p) * u[k, j]
        basis_states = basis_states @ a.T
        for i in range(n):
            for j in range(m):
                basis_states[n + i * m + j, i] += u[k, j]

    A_ls = reg.reshape(N * p, n_cols)
    theta, *_ = np.linalg.lstsq(A_ls, y.reshape(N * p), rcond=None)
    x0 = theta[:n]
    b = theta[n:n + n_b].reshape(n, m)
    d = theta[n + n_b:].reshape(m, p).T
    return b, d, x0
