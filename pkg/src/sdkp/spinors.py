"""
Momentum-space solutions of the DKP equation.

Negative-frequency-phase amplitudes u^-(p) (field mode e^{-ipx}) solve
(pslash - m) u = 0; the antiparticle amplitudes u^+(p) (mode e^{+ipx})
solve (pslash + m) u = 0.  Normalization:

    ubar^- beta^0 u^- = +1,     ubar^+ beta^0 u^+ = -1,     ubar = u^dagger eta0

The null space is found numerically; the phase is fixed by making the
scalar-slot component real and positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dkp_algebra import BetaSet, _betas, slash
from .errors import KinematicsError, OffShellError
from .kinematics import msq

ONSHELL_RTOL = 1e-10
NORM_SIGN = {"-": 1.0, "+": -1.0}


@dataclass(frozen=True, eq=False)
class DkpSpinor:
    components: np.ndarray
    momentum: np.ndarray
    freq: str
    mass: float

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.components, dtype=dtype)


def _check_momentum(p, m):
    p = np.asarray(p, dtype=float)
    if p[0] <= 0:
        raise KinematicsError(f"p^0 must be positive, got {p[0]!r}")
    if abs(msq(p) - m**2) > ONSHELL_RTOL * max(m**2, p[0] ** 2):
        raise OffShellError(f"p={p} is off shell for m={m!r} (p.p={msq(p)!r})")
    return p


def solve_u(p, freq: str, m: float, betas: BetaSet | None = None) -> DkpSpinor:
    if freq not in NORM_SIGN:
        raise ValueError(f"freq must be '+' or '-', got {freq!r}")
    if m <= 0:
        raise ValueError("mass must be positive")
    b = _betas(betas)
    p = _check_momentum(p, m)
    sign = -1.0 if freq == "-" else 1.0
    op = slash(p, b) + sign * m * np.eye(5)
    _, sv, vh = np.linalg.svd(op)
    tol = 1e-10 * max(1.0, sv[0])
    null_dim = int(np.sum(sv < tol))
    if null_dim == 0:
        raise OffShellError("DKP operator has no null space")
    if null_dim > 1:
        raise RuntimeError(f"degenerate null space of dimension {null_dim}")
    u = vh[-1].conj()
    phase = u[0] / abs(u[0])
    u = u / phase
    u[0] = u[0].real
    norm = (u.conj() @ b.eta0 @ b.beta[0] @ u).real
    target = NORM_SIGN[freq]
    if norm * target <= 0:
        raise RuntimeError("normalization sign cannot be reached in this representation")
    u = u * np.sqrt(target / norm)
    return DkpSpinor(u, p, freq, float(m))


def bar(u, betas: BetaSet | None = None) -> np.ndarray:
    """Row vector u^dagger eta0."""
    return np.conj(np.asarray(u)) @ _betas(betas).eta0


def projector(p, m: float, betas: BetaSet | None = None) -> np.ndarray:
    """pslash (pslash + m) / (2 m p^0), equal to u^-(p) ubar^-(p)."""
    p = _check_momentum(p, m)
    ps = slash(p, betas)
    return ps @ (ps + m * np.eye(5)) / (2 * m * p[0])


def outer_bar(u, betas: BetaSet | None = None) -> np.ndarray:
    u = np.asarray(u)
    return np.outer(u, bar(u, betas))
