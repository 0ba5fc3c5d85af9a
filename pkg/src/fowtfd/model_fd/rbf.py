"""Online radial-basis approximator for unstructured faults.

A 6-input network (four monitored-channel deviations plus the two command
deviations) with 60 fixed Gaussian units and a linear readout into the
observer's state space.  Weights adapt by the same projected
normalized-gradient law as the isolation estimators; the weight matrix is
confined to a Frobenius-norm ball.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

N_CENTERS = 60
N_INPUTS = 6
_CENTER_SEED = 20240117  # fixed: the basis is part of the design, not the run
_INPUT_BOX = np.array([8.0, 8.0, 8.0, 8.0, 3.0, 3.0])  # admissible half-widths


def _make_centers() -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(_CENTER_SEED)
    centers = rng.uniform(-1.0, 1.0, size=(N_CENTERS, N_INPUTS)) * _INPUT_BOX
    d2 = np.sum((centers[:, None, :] - centers[None, :, :]) ** 2, axis=-1)
    np.fill_diagonal(d2, np.inf)
    widths = 1.5 * np.sqrt(np.median(np.min(d2, axis=1)))
    return centers, np.full(N_CENTERS, widths)


@dataclass
class RbfApproximator:
    """Gaussian-basis network with projected linear readout."""

    n_outputs: int
    domain_radius: float = 200.0
    mu: float = 0.5
    eps: float = 1.0e-3
    centers: np.ndarray = field(default_factory=lambda: _make_centers()[0])
    widths: np.ndarray = field(default_factory=lambda: _make_centers()[1])
    weights: np.ndarray = None

    def __post_init__(self):
        if self.weights is None:
            self.weights = np.zeros((self.n_outputs, len(self.centers)))

    def reset(self) -> None:
        self.weights[:] = 0.0

    def basis(self, inp: np.ndarray) -> np.ndarray:
        d2 = np.sum((self.centers - inp) ** 2, axis=1)
        return np.exp(-d2 / (2.0 * self.widths**2))

    def features(self, y_n: np.ndarray, u_n: np.ndarray) -> np.ndarray:
        return np.concatenate([y_n[:4], u_n])

    def eval(self, y_n: np.ndarray, u_n: np.ndarray) -> np.ndarray:
        return self.weights @ self.basis(self.features(y_n, u_n))

    def weight_norm(self) -> float:
        return float(np.linalg.norm(self.weights))


def rbf_eval_update(approx: RbfApproximator, y_n: np.ndarray, u_n: np.ndarray,
                    residual: np.ndarray, c_matrix: np.ndarray):
    """Evaluate the network and adapt its weights from the residual.

    Returns (approximation vector, updated weights).  The update is the
    projected normalized-gradient law with the basis outputs as regressor;
    the weight matrix is rescaled onto the radius ball when exceeded.
    """
    phi = approx.basis(approx.features(y_n, u_n))
    out = approx.weights @ phi
    gram = float(phi @ phi) * float(np.sum(c_matrix * c_matrix))
    gamma = approx.mu / (approx.eps + gram)
    approx.weights = approx.weights + gamma * np.outer(c_matrix.T @ residual, phi)
    norm = np.linalg.norm(approx.weights)
    if norm > approx.domain_radius:
        approx.weights *= approx.domain_radius / norm
    return out, approx.weights
