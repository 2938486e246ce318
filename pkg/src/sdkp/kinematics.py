"""
Two-body kinematics in the frames used for the tree-level processes.

Four-vectors are plain float arrays ``(E, px, py, pz)`` in natural units.
Every process scatters in the x-z plane with the incoming beam along +z.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .dkp_algebra import METRIC
from .errors import KinematicsError, OffShellError

PROCESSES = ("coulomb", "moller", "compton")
FRAMES = ("lab", "cm")
ONSHELL_RTOL = 1e-12
CONSERVATION_RTOL = 1e-12


def four_vector(t, x=0.0, y=0.0, z=0.0) -> np.ndarray:
    return np.array([t, x, y, z], dtype=float)


def mdot(a, b) -> float:
    """Minkowski product with signature (+,-,-,-)."""
    return float(METRIC.dot(a, b))


def msq(a) -> float:
    return mdot(a, a)


def scale_of(*vectors) -> float:
    return max(float(np.max(np.abs(v))) for v in vectors)


class MandelstamSet(NamedTuple):
    s: float
    t: float
    u: float


@dataclass(frozen=True)
class PolarizationVector:
    """Real linear polarization eps = (0, eps_vec) transverse to photon momentum k."""

    eps: np.ndarray
    k: np.ndarray

    def __post_init__(self):
        eps = np.asarray(self.eps, dtype=float)
        k = np.asarray(self.k, dtype=float)
        if abs(eps[0]) > 1e-12:
            raise KinematicsError("polarization must have vanishing time component")
        kn = np.linalg.norm(k[1:])
        if kn == 0:
            raise KinematicsError("photon momentum has zero spatial part")
        if abs(eps[1:] @ k[1:]) > 1e-12 * kn:
            raise KinematicsError("polarization is not transverse to k")
        if abs(eps[1:] @ eps[1:] - 1.0) > 1e-12:
            raise KinematicsError("polarization is not unit normalized")
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "k", k)

    def overlap(self, other: "PolarizationVector") -> float:
        """Euclidean 3-vector product eps . eps'."""
        return float(self.eps[1:] @ other.eps[1:])


def polarization_basis(k) -> tuple[PolarizationVector, PolarizationVector]:
    """
    Two orthonormal transverse polarizations for photon momentum ``k``.

    The first lies in the plane spanned by k and the y axis normal
    (in-plane for x-z scattering), the second is k_hat x first.
    For k along +z this returns x_hat and y_hat.
    """
    k = np.asarray(k, dtype=float)
    kvec = k[1:]
    kn = np.linalg.norm(kvec)
    if kn == 0:
        raise KinematicsError("polarization basis undefined for zero spatial momentum")
    khat = kvec / kn
    ref = np.array([0.0, 1.0, 0.0])
    e1 = np.cross(ref, khat)
    if np.linalg.norm(e1) < 1e-8:
        # k along y
        e1 = np.cross(np.array([1.0, 0.0, 0.0]), khat)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(khat, e1)
    e2 /= np.linalg.norm(e2)
    return (
        PolarizationVector(np.concatenate(([0.0], e1)), k),
        PolarizationVector(np.concatenate(([0.0], e2)), k),
    )


@dataclass(frozen=True)
class ScatterProcess:
    """Kinematic configuration of a coulomb, moller or compton event.

    ``incoming``/``outgoing`` order: massive leg(s) first, photon last
    (compton: ``(p_i, k_i)`` and ``(p_f, k_f)``).
    """

    process: str
    incoming: tuple
    outgoing: tuple
    mass: float
    frame: str
    coupling: Optional[float] = None
    polarizations: tuple = field(default=())

    def __post_init__(self):
        if self.process not in PROCESSES:
            raise ValueError(f"unknown process {self.process!r}")
        if self.frame not in FRAMES:
            raise ValueError(f"unknown frame {self.frame!r}")
        object.__setattr__(self, "incoming", tuple(np.asarray(v, float) for v in self.incoming))
        object.__setattr__(self, "outgoing", tuple(np.asarray(v, float) for v in self.outgoing))
        self.validate()

    def massive_legs(self):
        if self.process == "compton":
            return (self.incoming[0], self.outgoing[0])
        return self.incoming + self.outgoing

    def photon_legs(self):
        if self.process == "compton":
            return (self.incoming[1], self.outgoing[1])
        return ()

    def validate(self):
        m2 = self.mass**2
        for p in self.massive_legs():
            if abs(msq(p) - m2) > ONSHELL_RTOL * max(m2, p[0] ** 2):
                raise OffShellError(f"massive leg {p} off shell: p.p={msq(p)!r}, m^2={m2!r}")
        for k in self.photon_legs():
            if abs(msq(k)) > ONSHELL_RTOL * k[0] ** 2:
                raise OffShellError(f"photon leg {k} not null")
        scale = scale_of(*self.incoming, *self.outgoing)
        if self.process == "coulomb":
            diff = self.incoming[0][0] - self.outgoing[0][0]
        else:
            diff = np.max(np.abs(sum(self.incoming) - sum(self.outgoing)))
        if abs(diff) > CONSERVATION_RTOL * scale:
            raise KinematicsError(f"{self.process}: conservation violated by {diff!r}")

    @property
    def momenta(self) -> dict:
        if self.process == "coulomb":
            return {"p_i": self.incoming[0], "p_f": self.outgoing[0]}
        if self.process == "moller":
            p_i, q_i = self.incoming
            p_f, q_f = self.outgoing
            return {"p_i": p_i, "q_i": q_i, "p_f": p_f, "q_f": q_f}
        p_i, k_i = self.incoming
        p_f, k_f = self.outgoing
        return {"p_i": p_i, "k_i": k_i, "p_f": p_f, "k_f": k_f}


def mandelstam(p_i, q_i, p_f, q_f, rtol: float = 1e-10) -> MandelstamSet:
    """s=(p_i+q_i)^2, t=(p_i-p_f)^2, u=(p_i-q_f)^2 for a 2->2 process."""
    p_i, q_i, p_f, q_f = (np.asarray(v, float) for v in (p_i, q_i, p_f, q_f))
    viol = np.max(np.abs(p_i + q_i - p_f - q_f))
    if viol > rtol * scale_of(p_i, q_i, p_f, q_f):
        raise KinematicsError(f"four-momentum not conserved (violation {viol:.3e})")
    return MandelstamSet(msq(p_i + q_i), msq(p_i - p_f), msq(p_i - q_f))


def _check_open_angle(theta: float):
    if not 0.0 < theta < np.pi:
        raise KinematicsError(f"scattering angle {theta!r} outside the open interval (0, pi)")


def cm_elastic(s: float, theta: float, m: float, coupling: Optional[float] = None) -> ScatterProcess:
    """Equal-mass elastic scattering in the centre-of-mass frame."""
    if m < 0:
        raise KinematicsError("mass must be non-negative")
    if s < 4 * m**2:
        raise KinematicsError(f"s={s!r} below threshold 4m^2={4 * m**2!r}")
    _check_open_angle(theta)
    energy = np.sqrt(s) / 2
    p = np.sqrt(max(s / 4 - m**2, 0.0))
    st, ct = np.sin(theta), np.cos(theta)
    incoming = (four_vector(energy, 0, 0, p), four_vector(energy, 0, 0, -p))
    outgoing = (four_vector(energy, p * st, 0, p * ct), four_vector(energy, -p * st, 0, -p * ct))
    return ScatterProcess("moller", incoming, outgoing, m, "cm", coupling)


def coulomb_elastic(energy: float, theta: float, m: float, coupling: Optional[float] = None) -> ScatterProcess:
    """Elastic scattering off a static field: |p_f| = |p_i|, beam along +z."""
    if energy < m:
        raise KinematicsError(f"energy {energy!r} below mass {m!r}")
    _check_open_angle(theta)
    p = np.sqrt(energy**2 - m**2)
    p_i = four_vector(energy, 0, 0, p)
    p_f = four_vector(energy, p * np.sin(theta), 0, p * np.cos(theta))
    return ScatterProcess("coulomb", (p_i,), (p_f,), m, "lab", coupling)


def compton_omega_f(omega_i: float, theta: float, m: float) -> float:
    """Outgoing photon energy for a target at rest."""
    return omega_i / (1.0 + (omega_i / m) * (1.0 - np.cos(theta)))


def compton_lab(omega_i: float, theta: float, m: float, coupling: Optional[float] = None) -> ScatterProcess:
    """Photon on a scalar at rest; photon beam along +z, scattered into x-z plane."""
    if omega_i <= 0:
        raise KinematicsError("omega_i must be positive")
    if m <= 0:
        raise KinematicsError("mass must be positive")
    if not 0.0 <= theta <= np.pi:
        raise KinematicsError(f"theta={theta!r} outside [0, pi]")
    omega_f = compton_omega_f(omega_i, theta, m)
    p_i = four_vector(m)
    k_i = four_vector(omega_i, 0, 0, omega_i)
    k_f = four_vector(omega_f, omega_f * np.sin(theta), 0, omega_f * np.cos(theta))
    p_f = p_i + k_i - k_f
    return ScatterProcess("compton", (p_i, k_i), (p_f, k_f), m, "lab", coupling)
