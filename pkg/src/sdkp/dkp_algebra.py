"""
Five-dimensional (spin-0) representation of the Duffin-Kemmer-Petiau algebra.

The multiplet is ordered (phi, psi^0, psi^1, psi^2, psi^3).  Each beta^mu has
exactly two nonzero entries linking the scalar slot to psi^mu:

    (beta^mu)[0, mu+1] = 1,      (beta^mu)[mu+1, 0] = g^{mu mu}

which satisfies

    beta^mu beta^nu beta^rho + beta^rho beta^nu beta^mu
        = beta^mu g^{nu rho} + beta^rho g^{mu nu}.

Matrices are stored complex so that slashes of complex momenta work.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import Sequence

import numpy as np

DIM = 5
METRIC_SIGNATURE = (1.0, -1.0, -1.0, -1.0)
ALGEBRA_ATOL = 1e-12


@dataclass(frozen=True)
class MetricTensor:
    signature: tuple[float, ...] = METRIC_SIGNATURE

    def __post_init__(self):
        if len(self.signature) != 4:
            raise ValueError("metric must be four-dimensional")

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(np.asarray(self.signature, dtype=float))

    def lower(self, v):
        """Lower (or raise; the metric is its own inverse) a Lorentz index."""
        return np.asarray(self.signature) * np.asarray(v)

    def dot(self, a, b):
        """Minkowski product a.b = g_{mu nu} a^mu b^nu (no complex conjugation)."""
        return np.sum(self.lower(a) * np.asarray(b), axis=-1)


METRIC = MetricTensor()


@dataclass(frozen=True, eq=False)
class BetaSet:
    """The four beta matrices, eta^0 and the metric they are built against."""

    beta: np.ndarray  # shape (4, 5, 5)
    eta0: np.ndarray
    metric: MetricTensor = METRIC

    def __post_init__(self):
        for arr in (self.beta, self.eta0):
            arr.setflags(write=False)

    def __getitem__(self, mu: int) -> np.ndarray:
        return self.beta[mu]

    def algebra_residual(self) -> float:
        """Max-abs residual of the trilinear relation over all 64 index triples."""
        g = self.metric.matrix
        worst = 0.0
        for mu, nu, rho in product(range(4), repeat=3):
            b = self.beta
            lhs = b[mu] @ b[nu] @ b[rho] + b[rho] @ b[nu] @ b[mu]
            rhs = b[mu] * g[nu, rho] + b[rho] * g[mu, nu]
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        return worst

    def eta0_residual(self) -> float:
        expected = 2 * self.beta[0] @ self.beta[0] - np.eye(DIM)
        return float(np.max(np.abs(self.eta0 - expected)))

    def eta0_involution_residual(self) -> float:
        return float(np.max(np.abs(self.eta0 @ self.eta0 - np.eye(DIM))))

    def hermiticity_residual(self) -> float:
        """max_mu |beta^mu^dagger - eta0 beta^mu eta0|."""
        return max(
            float(np.max(np.abs(b.conj().T - self.eta0 @ b @ self.eta0)))
            for b in self.beta
        )

    def check(self, atol: float = ALGEBRA_ATOL) -> bool:
        return max(
            self.algebra_residual(),
            self.eta0_residual(),
            self.eta0_involution_residual(),
            self.hermiticity_residual(),
        ) < atol


def build_beta_representation(metric: MetricTensor = METRIC) -> BetaSet:
    beta = np.zeros((4, DIM, DIM), dtype=complex)
    for mu in range(4):
        beta[mu, 0, mu + 1] = 1.0
        beta[mu, mu + 1, 0] = metric.signature[mu]
    eta0 = 2 * beta[0] @ beta[0] - np.eye(DIM)
    return BetaSet(beta=beta, eta0=eta0, metric=metric)


BETAS = build_beta_representation()


def _betas(betas: BetaSet | None) -> BetaSet:
    return BETAS if betas is None else betas


def slash(p, betas: BetaSet | None = None) -> np.ndarray:
    """beta^mu p_mu for a contravariant four-vector ``p``."""
    b = _betas(betas)
    p_low = b.metric.lower(np.asarray(p))
    return np.tensordot(p_low, b.beta, axes=(0, 0))


def bar_matrix(a: np.ndarray, betas: BetaSet | None = None) -> np.ndarray:
    """DKP adjoint of a matrix, eta0 a^dagger eta0."""
    eta0 = _betas(betas).eta0
    return eta0 @ np.conj(a).T @ eta0


def trace_product(ms: Sequence[np.ndarray]) -> complex:
    """Trace of the ordered product ms[0] @ ms[1] @ ...."""
    if len(ms) == 0:
        raise ValueError("trace_product needs at least one matrix")
    for m in ms:
        if np.shape(m) != (DIM, DIM):
            raise ValueError(f"expected {DIM}x{DIM} matrices, got shape {np.shape(m)}")
    return complex(np.trace(reduce(np.matmul, ms)))


def beta_string_trace(idx: Sequence[int], betas: BetaSet | None = None) -> complex:
    """Brute-force Tr[beta^{mu_1} ... beta^{mu_n}] on explicit matrices."""
    b = _betas(betas)
    return trace_product([b.beta[mu] for mu in _check_indices(idx)])


def _check_indices(idx: Sequence[int]) -> tuple[int, ...]:
    idx = tuple(int(i) for i in idx)
    if len(idx) < 1:
        raise ValueError("index string must have length >= 1")
    if any(i not in (0, 1, 2, 3) for i in idx):
        raise ValueError(f"Lorentz indices must lie in 0..3, got {idx}")
    return idx


def trace_identity(idx: Sequence[int], metric: MetricTensor = METRIC) -> float:
    """
    Closed-form trace of a beta string, evaluated without matrices.

    Odd strings vanish.  Even strings give the sum of two metric chains,
    g^{m1 m2} g^{m3 m4} ... + g^{m2 m3} g^{m4 m5} ... g^{m2n m1}.
    """
    idx = _check_indices(idx)
    n = len(idx)
    if n % 2:
        return 0.0
    g = metric.matrix
    first = np.prod([g[idx[k], idx[k + 1]] for k in range(0, n, 2)])
    second = np.prod([g[idx[k], idx[(k + 1) % n]] for k in range(1, n, 2)])
    return float(first + second)
