"""
Causal distributions in momentum space, their singular order and splitting.

A descriptor is a matrix-valued polynomial in p multiplying a single mass-shell
delta delta(p^2 - m^2) and a frequency factor (sgn p^0 or a step function).
Dilating p -> p/alpha gives delta((p/alpha)^2 - m^2) = alpha^2 delta(p^2 - alpha^2 m^2),
and the leading monomial of degree n contributes alpha^{-n}, so the power
counting function is rho(alpha) = alpha^{n-2} and the singular order is n - 2.

The dispersion integrals that perform the splitting are not evaluated: a split
is recorded as a classification plus the slots for the undetermined polynomial,
which is all the tree-level observables need.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Optional

import numpy as np

from .dkp_algebra import DIM, BetaSet, _betas, slash
from .errors import GaugeError, PoleError, UnsupportedDistribution
from .kinematics import msq

FREQUENCY_TAGS = ("sgn", "theta+", "theta-")
SUPPORTED_SUPPORT = "delta"
POLE_GUARD = 1e-9


@dataclass(frozen=True, eq=False)
class PolynomialTerm:
    """
    Homogeneous term of degree n: coefficient tensor C with shape
    (4,)*n + matrix_shape, contracted with n covariant copies of p.
    """

    coeff: np.ndarray
    degree: int

    def __post_init__(self):
        coeff = np.asarray(self.coeff)
        if self.degree < 0:
            raise ValueError("polynomial degree must be >= 0")
        if coeff.shape[: self.degree] != (4,) * self.degree:
            raise ValueError(f"coefficient shape {coeff.shape} incompatible with degree {self.degree}")
        object.__setattr__(self, "coeff", coeff)

    @property
    def matrix_shape(self) -> tuple:
        return self.coeff.shape[self.degree:]

    def is_zero(self) -> bool:
        return not np.any(self.coeff)

    def evaluate(self, p_low) -> np.ndarray:
        out = self.coeff
        for _ in range(self.degree):
            out = np.tensordot(p_low, out, axes=(0, 0))
        return out


@dataclass(frozen=True, eq=False)
class DistributionDescriptor:
    name: str
    terms: tuple
    mass: float = 0.0
    frequency: str = "sgn"
    prefactor: complex = 1.0
    support: str = SUPPORTED_SUPPORT

    def __post_init__(self):
        if self.mass < 0:
            raise ValueError("mass must be >= 0")
        if self.frequency not in FREQUENCY_TAGS:
            raise ValueError(f"unknown frequency tag {self.frequency!r}")
        if not self.terms:
            raise ValueError("descriptor needs at least one polynomial term")
        shapes = {t.matrix_shape for t in self.terms}
        if len(shapes) != 1:
            raise ValueError(f"terms have inconsistent matrix shapes {shapes}")
        object.__setattr__(self, "terms", tuple(self.terms))

    @property
    def matrix_shape(self) -> tuple:
        return self.terms[0].matrix_shape

    @property
    def degree(self) -> int:
        nonzero = [t.degree for t in self.terms if not t.is_zero()]
        if not nonzero:
            raise UnsupportedDistribution(f"{self.name}: polynomial vanishes identically")
        return max(nonzero)

    def polynomial(self, p) -> np.ndarray:
        """Value of the polynomial factor (prefactor included) at contravariant p."""
        p_low = np.asarray([1.0, -1.0, -1.0, -1.0]) * np.asarray(p)
        return self.prefactor * sum(t.evaluate(p_low) for t in self.terms)


@dataclass(frozen=True)
class SingularOrder:
    omega: int

    @property
    def regular(self) -> bool:
        return self.omega < 0


@dataclass(frozen=True, eq=False)
class RetardedPart:
    source: DistributionDescriptor
    heaviside: bool
    constant_slots: tuple = field(default=())

    def describe(self) -> str:
        if self.heaviside:
            return f"theta(x^0) * {self.source.name}"
        slots = " + ".join(f"C_{i}" for i in range(len(self.constant_slots)))
        return f"dispersion[{self.source.name}] + {slots}"


@dataclass(frozen=True, eq=False)
class SplitResult:
    classification: str
    omega: int
    n_constants: int
    retarded: RetardedPart

    @property
    def regular(self) -> bool:
        return self.classification == "regular"


def singular_order(d: DistributionDescriptor) -> SingularOrder:
    if d.support != SUPPORTED_SUPPORT:
        raise UnsupportedDistribution(
            f"{d.name}: support {d.support!r} not supported, only single mass-shell delta"
        )
    return SingularOrder(d.degree - 2)


def _monomial_count(omega: int) -> int:
    # monomials of degree 0..omega in the four components of p
    return sum(comb(l + 3, 3) for l in range(omega + 1))


def split(d: DistributionDescriptor) -> SplitResult:
    omega = singular_order(d).omega
    if omega < 0:
        return SplitResult("regular", omega, 0, RetardedPart(d, heaviside=True))
    n = _monomial_count(omega)
    slots = tuple(d.matrix_shape for _ in range(n))
    return SplitResult("singular", omega, n, RetardedPart(d, heaviside=False, constant_slots=slots))


# -- the descriptors appearing at tree level --------------------------------

def jordan_pauli(m: float = 0.0, frequency: str = "sgn") -> DistributionDescriptor:
    """D_m(p) = (i/2pi) delta(p^2 - m^2) sgn(p^0) (or its frequency parts)."""
    sign = -1.0 if frequency == "theta-" else 1.0
    name = "D_0" if m == 0 else "D_m"
    return DistributionDescriptor(
        name, (PolynomialTerm(np.array(1.0 + 0j), 0),), m, frequency, sign * 1j / (2 * np.pi)
    )


def dkp_commutator(m: float, frequency: str = "sgn", betas: BetaSet | None = None) -> DistributionDescriptor:
    """S(p) = (1/m) pslash (pslash + m) D_m(p)."""
    if m <= 0:
        raise ValueError("DKP commutator needs m > 0")
    b = _betas(betas).beta
    quad = np.einsum("aij,bjk->abik", b, b)
    lin = m * b
    sign = -1.0 if frequency == "theta-" else 1.0
    return DistributionDescriptor(
        "S",
        (PolynomialTerm(quad, 2), PolynomialTerm(lin, 1)),
        m,
        frequency,
        sign * 1j / (2 * np.pi * m),
    )


def scalar_descriptor(degree: int, m: float = 0.0, frequency: str = "sgn", name: Optional[str] = None):
    """Scalar polynomial (p^0)^degree times the mass-shell delta; used for power counting."""
    coeff = np.zeros((4,) * degree, dtype=complex)
    coeff[(0,) * degree] = 1.0
    return DistributionDescriptor(name or f"deg{degree}", (PolynomialTerm(coeff, degree),), m, frequency)


# -- Feynman propagators ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PropagatorValue:
    value: np.ndarray
    momentum: np.ndarray
    prescription: str = "+i0"

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.value, dtype=dtype)


def _pole_guard(denominator: float, m: float, what: str):
    if abs(denominator) < POLE_GUARD * max(1.0, m * m):
        raise PoleError(f"{what} evaluated on its pole (q^2 - m^2 = {denominator!r})")


def photon_feynman(q) -> complex:
    """
    Momentum-space massless propagator -1/(q.q + i0).

    At tree level the denominator is real and nonzero; the +i0 is a tag only.
    """
    q2 = msq(q)
    _pole_guard(q2, 0.0, "photon propagator")
    return complex(-1.0 / q2)


def dkp_feynman(q, m: float, c=None, betas: BetaSet | None = None) -> PropagatorValue:
    """
    -(1/m) qslash (qslash + m) / (q^2 - m^2) + c.

    Single place where the propagator sign is fixed: with this sign and
    c = I/m the Compton amplitude is  pref * ubar eps_a S eps_b u  summed over
    both orderings, which reproduces the seagull and pole terms.
    """
    if m <= 0:
        raise ValueError("DKP propagator needs m > 0")
    q = np.asarray(q, dtype=float)
    den = msq(q) - m * m
    _pole_guard(den, m, "DKP propagator")
    qs = slash(q, betas)
    value = -(qs @ (qs + m * np.eye(DIM))) / (m * den)
    if c is not None:
        value = value + np.asarray(c)
    return PropagatorValue(value, q)


def fix_gauge_constant(m: float) -> np.ndarray:
    """
    Splitting constant from second-order gauge invariance.

    The delta-derivative term in the divergence of the two-photon vertex
    carries the factor (-1/m + C); it vanishes only for C = I/m.
    """
    if m == 0:
        raise GaugeError("gauge constant undefined for m = 0")
    if m < 0:
        raise ValueError("mass must be positive")
    return np.eye(DIM, dtype=complex) / m


def gauge_condition_residual(c, m: float) -> float:
    """Max-abs of the delta-derivative coefficient C - I/m (zero when gauge invariant)."""
    return float(np.max(np.abs(np.asarray(c) - np.eye(DIM) / m)))
