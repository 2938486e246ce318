"""
Squared matrix elements for Coulomb, Moller and Compton scattering.

Every observable is evaluated along independent routes:

* ``spinor``: explicit u^-(p) from the null-space solver contracted with beta's,
* ``trace``: spin sums replaced by projectors pslash(pslash+m)/(2mp^0) and traced,
* ``closed``: the reduced analytic form.

The (2 pi) powers follow the wave-packet normalization of the field modes, so the
flux factors in :mod:`sdkp.cross_sections` apply verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .dkp_algebra import BETAS, DIM, METRIC, bar_matrix, slash
from .distributions import dkp_feynman, fix_gauge_constant, photon_feynman
from .errors import GaugeError, KinematicsError, PipelineMismatch
from .kinematics import PolarizationVector, ScatterProcess, mandelstam, mdot, msq
from .spinors import bar, projector, solve_u

ALPHA_DEFAULT = 1 / 137.035999
E_DEFAULT = float(np.sqrt(4 * np.pi * ALPHA_DEFAULT))

COULOMB_RTOL = 1e-10
MOLLER_RTOL = 1e-8
COMPTON_RTOL = 1e-8
_G = METRIC.matrix


def coupling_from_alpha(alpha: float) -> float:
    return float(np.sqrt(4 * np.pi * alpha))


def alpha_from_coupling(e: float) -> float:
    return e * e / (4 * np.pi)


def relative_spread(values) -> float:
    """max |v_a - v_b| / max |v| over all pairs."""
    vals = np.asarray([complex(v) for v in values])
    scale = np.max(np.abs(vals))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(vals[:, None] - vals[None, :])) / scale)


@dataclass(frozen=True)
class AmplitudeValue:
    value: complex
    pipeline: str


@dataclass(frozen=True)
class MsqResult:
    """|M|^2 along each pipeline plus the relative spread between them."""

    values: dict
    spread: float

    def __getitem__(self, key):
        return self.values[key]


# -- external fields ------------------------------------------------------------

class ExternalFieldProfile:
    """
    Fourier amplitude hat A^mu(p) of a static external field (contravariant).

    ``func`` maps a spatial momentum (3,) to a complex (4,) array.
    """

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], name: str = "field"):
        self._func = func
        self.name = name

    def __call__(self, p) -> np.ndarray:
        return np.asarray(self._func(np.asarray(p, dtype=float)), dtype=complex)

    def hermiticity_residual(self, samples) -> float:
        """max |A(-p) - A(p)^*| over the given spatial momenta."""
        return max(float(np.max(np.abs(self(-np.asarray(p)) - np.conj(self(p))))) for p in samples)


def coulomb_field(Z: float, e: float = E_DEFAULT) -> ExternalFieldProfile:
    """Point charge Ze: hat A^0(p) = sqrt(2/pi) Z e / |p|^2, spatial parts zero."""

    def amp(p):
        p2 = float(p @ p)
        if p2 == 0:
            raise KinematicsError("Coulomb amplitude is singular at zero momentum transfer")
        return np.array([np.sqrt(2 / np.pi) * Z * e / p2, 0, 0, 0], dtype=complex)

    return ExternalFieldProfile(amp, name=f"coulomb(Z={Z})")


class TabulatedField(ExternalFieldProfile):
    """Field sampled on a finite set of momenta; queries must hit a sample."""

    def __init__(self, momenta: np.ndarray, amplitudes: np.ndarray, name="table", atol=1e-9):
        self.momenta = np.asarray(momenta, dtype=float).reshape(-1, 3)
        self.amplitudes = np.asarray(amplitudes, dtype=complex).reshape(-1, 4)
        self.atol = atol
        super().__init__(self._lookup, name)

    def _lookup(self, p):
        dist = np.max(np.abs(self.momenta - p), axis=1)
        i = int(np.argmin(dist))
        if dist[i] > self.atol * max(1.0, float(np.max(np.abs(p)))):
            raise KeyError(f"momentum {p} not in field table")
        return self.amplitudes[i]

    def hermiticity_residual(self, samples=None) -> float:
        samples = self.momenta if samples is None else samples
        worst = 0.0
        for p in samples:
            try:
                worst = max(worst, float(np.max(np.abs(self(-p) - np.conj(self(p))))))
            except KeyError:
                continue
        return worst


def load_field_table(path) -> TabulatedField:
    """
    Whitespace table, one sample per line:
    px py pz  Re A^0 Im A^0  Re A^1 Im A^1  Re A^2 Im A^2  Re A^3 Im A^3.
    Lines starting with '#' are ignored.
    """
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] != 11:
        raise ValueError(f"{path}: expected 11 columns per line, found {data.shape[1]}")
    amps = data[:, 3::2] + 1j * data[:, 4::2]
    return TabulatedField(data[:, :3], amps, name=Path(path).name)


def save_field_table(path, momenta, field: ExternalFieldProfile):
    rows = []
    for p in np.asarray(momenta, dtype=float).reshape(-1, 3):
        a = field(p)
        rows.append(np.concatenate([p, np.column_stack([a.real, a.imag]).ravel()]))
    header = "px py pz  ReA0 ImA0  ReA1 ImA1  ReA2 ImA2  ReA3 ImA3"
    np.savetxt(path, np.array(rows), fmt="%.17g", header=header)


# -- Coulomb ------------------------------------------------------------------------

def _require(proc: ScatterProcess, process: str, frame: Optional[str] = None):
    if proc.process != process:
        raise KinematicsError(f"expected a {process} process, got {proc.process}")
    if frame is not None and proc.frame != frame:
        raise KinematicsError(f"{process} amplitude requires the {frame} frame, got {proc.frame}")


def _coupling(proc: ScatterProcess) -> float:
    return E_DEFAULT if proc.coupling is None else proc.coupling


def coulomb_amplitude(proc: ScatterProcess, field: ExternalFieldProfile) -> AmplitudeValue:
    """M = ie/(2pi)^{1/2} ubar^-(p_f) beta^mu u^-(p_i) hat A_mu(p_f - p_i)."""
    _require(proc, "coulomb")
    e, m = _coupling(proc), proc.mass
    p_i, p_f = proc.incoming[0], proc.outgoing[0]
    u_i, u_f = solve_u(p_i, "-", m), solve_u(p_f, "-", m)
    a = field(p_f[1:] - p_i[1:])
    value = 1j * e / np.sqrt(2 * np.pi) * (bar(u_f) @ slash(a) @ u_i.components)
    return AmplitudeValue(complex(value), "spinor")


def coulomb_trace_bracket(p_i, p_f, a_plus, a_minus) -> complex:
    """[p_i^mu p_i^nu + p_f^mu p_f^nu + p_f^mu p_i^nu + p_f^nu p_i^mu] A_nu(+) A_mu(-)."""
    a_plus_low, a_minus_low = METRIC.lower(a_plus), METRIC.lower(a_minus)
    t = np.outer(p_i, p_i) + np.outer(p_f, p_f) + np.outer(p_f, p_i) + np.outer(p_i, p_f)
    return complex(a_minus_low @ t @ a_plus_low)


def coulomb_msq_pipelines(proc: ScatterProcess, field: ExternalFieldProfile) -> MsqResult:
    _require(proc, "coulomb")
    e, m = _coupling(proc), proc.mass
    p_i, p_f = proc.incoming[0], proc.outgoing[0]
    if abs(np.linalg.norm(p_i[1:]) - np.linalg.norm(p_f[1:])) > 1e-12 * max(1.0, p_i[0]):
        raise KinematicsError("Coulomb scattering requires |p_f| = |p_i|")
    spinor = abs(coulomb_amplitude(proc, field).value) ** 2

    a_plus = field(p_f[1:] - p_i[1:])
    a_minus = field(p_i[1:] - p_f[1:])
    tr = np.trace(projector(p_f, m) @ slash(a_plus) @ projector(p_i, m) @ slash(a_minus))
    trace = e * e / (2 * np.pi) * tr

    closed = e * e / (2 * np.pi) * coulomb_trace_bracket(p_i, p_f, a_plus, a_minus) / (4 * p_i[0] * p_f[0])
    values = {"spinor": spinor, "trace": complex(trace), "closed": complex(closed)}
    spread = relative_spread(values.values())
    return MsqResult(values, spread)


def coulomb_msq(proc: ScatterProcess, field: ExternalFieldProfile, rtol: float = COULOMB_RTOL) -> float:
    res = coulomb_msq_pipelines(proc, field)
    if res.spread > rtol:
        raise PipelineMismatch("coulomb |M|^2", res.values, res.spread, rtol)
    return float(res["spinor"])


# -- Moller -------------------------------------------------------------------------

def _moller_setup(proc: ScatterProcess):
    _require(proc, "moller")
    mom = proc.momenta
    mand = mandelstam(mom["p_i"], mom["q_i"], mom["p_f"], mom["q_f"])
    scale = max(abs(mand.s), 1e-300)
    if abs(mand.t) < 1e-12 * scale or abs(mand.u) < 1e-12 * scale:
        raise KinematicsError("Moller amplitude diverges at forward/backward angles (t or u = 0)")
    return mom, mand


def moller_amplitude(proc: ScatterProcess) -> AmplitudeValue:
    """
    Direct and exchange photon graphs, both weighted by the photon propagator.

    The overall factor is e^2 i g_{mu nu}/(2pi)^2 [J_pp J_qq /t + J_pq J_qp /u],
    evaluated via photon_feynman so that only the common sign changes.
    """
    mom, _ = _moller_setup(proc)
    e, m = _coupling(proc), proc.mass
    u = {k: solve_u(v, "-", m).components for k, v in mom.items()}
    ub = {k: bar(v) for k, v in u.items()}

    def current(fin, ini):
        return np.array([ub[fin] @ BETAS.beta[mu] @ u[ini] for mu in range(4)])

    direct = METRIC.dot(current("p_f", "p_i"), current("q_f", "q_i"))
    exchange = METRIC.dot(current("p_f", "q_i"), current("q_f", "p_i"))
    d_t = photon_feynman(mom["q_f"] - mom["q_i"])
    d_u = photon_feynman(mom["q_f"] - mom["p_i"])
    value = -1j * e * e / (2 * np.pi) ** 2 * (direct * d_t + exchange * d_u)
    return AmplitudeValue(complex(value), "spinor")


def _vertex_tensor(p_out, p_in, m):
    """V[a, b] = Tr[P_out beta^a P_in beta^b]."""
    left = projector(p_out, m) @ BETAS.beta  # (4,5,5)
    right = projector(p_in, m) @ BETAS.beta
    return np.einsum("aij,bji->ab", left, right)


def moller_trace(proc: ScatterProcess) -> float:
    """Four-trace form of |M|^2 with explicit matrices."""
    mom, _ = _moller_setup(proc)
    e, m = _coupling(proc), proc.mass
    p_i, q_i, p_f, q_f = mom["p_i"], mom["q_i"], mom["p_f"], mom["q_f"]
    t_den = msq(q_f - q_i)
    u_den = msq(q_f - p_i)
    g = _G

    # direct^2: Tr[Pf b^a Pi b^w] Tr[Qf b^mu Qi b^nu] g_{mu a} g_{nu w}
    v_p = _vertex_tensor(p_f, p_i, m)
    v_q = _vertex_tensor(q_f, q_i, m)
    term_tt = np.einsum("aw,mn,ma,nw->", v_p, v_q, g, g) / t_den**2

    v_pq = _vertex_tensor(p_f, q_i, m)
    v_qp = _vertex_tensor(q_f, p_i, m)
    term_uu = np.einsum("aw,mn,ma,nw->", v_pq, v_qp, g, g) / u_den**2

    # interference: one trace through all four external legs
    pf = projector(p_f, m) @ BETAS.beta
    pi = projector(p_i, m) @ BETAS.beta
    qf = projector(q_f, m) @ BETAS.beta
    qi = projector(q_i, m) @ BETAS.beta
    # direct * exchange^*: Tr[Pf b^a Pi b^w Qf b^n Qi b^m] g_{a n} g_{w m}
    chain = np.einsum("aij,wjk,nkl,mli->awnm", pf, pi, qf, qi)
    cross = np.einsum("awnm,an,wm->", chain, g, g) / (t_den * u_den)
    total = term_tt + term_uu + cross + np.conj(cross)
    return float((e**4 / (2 * np.pi) ** 4 * total).real)


def moller_closed(proc: ScatterProcess) -> float:
    """e^4/(2pi)^4 1/(16 E^4) |(s-t)/u + (s-u)/t|^2 with E the per-particle cm energy."""
    mom, mand = _moller_setup(proc)
    e = _coupling(proc)
    if proc.frame != "cm":
        raise KinematicsError("closed Moller form is written in the cm frame")
    energy = mom["p_i"][0]
    s, t, u = mand
    return float(e**4 / (2 * np.pi) ** 4 / (16 * energy**4) * ((s - t) / u + (s - u) / t) ** 2)


def moller_msq_pipelines(proc: ScatterProcess) -> MsqResult:
    values = {
        "spinor": abs(moller_amplitude(proc).value) ** 2,
        "trace": moller_trace(proc),
        "closed": moller_closed(proc),
    }
    return MsqResult(values, relative_spread(values.values()))


def moller_msq(proc: ScatterProcess, rtol: float = MOLLER_RTOL) -> float:
    res = moller_msq_pipelines(proc)
    if res.spread > rtol:
        raise PipelineMismatch("moller |M|^2", res.values, res.spread, rtol)
    return float(res["trace"])


# -- Compton ------------------------------------------------------------------------

@dataclass(frozen=True)
class ComptonParts:
    """Seagull (a) and propagator (b) contributions and their interference."""

    m_a: complex
    m_b: complex
    msq_a: float
    msq_b: float
    cross: float  # M_a^* M_b + M_b^* M_a
    msq: float
    msq_trace: float
    denominators: dict

    @property
    def total(self) -> float:
        return self.msq


def compton_denominators(proc: ScatterProcess) -> dict:
    """Propagator denominators computed directly and in their lab-frame reduced form."""
    mom = proc.momenta
    m = proc.mass
    return {
        "u_direct": msq(mom["p_i"] - mom["k_f"]) - m * m,
        "u_reduced": -2 * m * mom["k_f"][0],
        "s_direct": msq(mom["p_i"] + mom["k_i"]) - m * m,
        "s_reduced": 2 * m * mom["k_i"][0],
    }


def compton_msq(
    proc: ScatterProcess,
    eps_i: PolarizationVector,
    eps_f: PolarizationVector,
    c=None,
    check_gauge: bool = True,
) -> ComptonParts:
    """
    M = M_a + M_b with
      M_a = pref * ubar_f [eps_f C eps_i + eps_i C eps_f] u_i                (contact term)
      M_b = pref * ubar_f [eps_f S(p_i+k_i) eps_i + eps_i S(p_i-k_f) eps_f] u_i
    where S is the c-free DKP propagator and pref = i e^2 / ((2pi)^2 sqrt(2w_i) sqrt(2w_f)).
    """
    _require(proc, "compton", "lab")
    mom = proc.momenta
    m, e = proc.mass, _coupling(proc)
    p_i, k_i, p_f, k_f = mom["p_i"], mom["k_i"], mom["p_f"], mom["k_f"]
    if np.max(np.abs(p_i[1:])) != 0.0:
        raise KinematicsError("Compton amplitude requires the target at rest")
    if c is None:
        c = fix_gauge_constant(m)
    c = np.asarray(c, dtype=complex)
    if c.shape != (DIM, DIM):
        raise GaugeError(f"splitting constant must be {DIM}x{DIM}")
    if check_gauge and not np.allclose(c, fix_gauge_constant(m), rtol=0, atol=1e-14 / m):
        raise GaugeError("splitting constant does not match I/m for this mass")
    if not (np.allclose(eps_i.k, k_i) and np.allclose(eps_f.k, k_f)):
        raise KinematicsError("polarizations do not belong to the process photon momenta")

    den = compton_denominators(proc)
    for direct, reduced in (("u_direct", "u_reduced"), ("s_direct", "s_reduced")):
        if abs(den[direct] - den[reduced]) > 1e-10 * max(abs(den[reduced]), m * m * 1e-6):
            raise PipelineMismatch("compton denominators", den, abs(den[direct] - den[reduced]), 1e-10)

    u_i = solve_u(p_i, "-", m).components
    ub_f = bar(solve_u(p_f, "-", m).components)
    ei, ef = slash(eps_i.eps), slash(eps_f.eps)
    pref = 1j * e * e / ((2 * np.pi) ** 2 * np.sqrt(2 * k_i[0]) * np.sqrt(2 * k_f[0]))

    s_chan = dkp_feynman(p_i + k_i, m).value
    u_chan = dkp_feynman(p_i - k_f, m).value
    gamma_a = ef @ c @ ei + ei @ c @ ef
    gamma_b = ef @ s_chan @ ei + ei @ u_chan @ ef
    m_a = complex(pref * (ub_f @ gamma_a @ u_i))
    m_b = complex(pref * (ub_f @ gamma_b @ u_i))
    msq_a = abs(m_a) ** 2
    msq_b = abs(m_b) ** 2
    cross = 2.0 * (np.conj(m_a) * m_b).real
    total = abs(m_a + m_b) ** 2

    gamma = gamma_a + gamma_b
    tr = np.trace(projector(p_f, m) @ gamma @ projector(p_i, m) @ bar_matrix(gamma))
    msq_trace = float((abs(pref) ** 2 * tr).real)
    return ComptonParts(m_a, m_b, msq_a, msq_b, float(cross), float(total), msq_trace, den)


def compton_msq_a_closed(proc: ScatterProcess, eps_i: PolarizationVector, eps_f: PolarizationVector) -> float:
    """e^4 (eps_i.eps_f)^2 / (2^6 pi^4 w_i w_f m E_f)."""
    mom = proc.momenta
    e, m = _coupling(proc), proc.mass
    w_i, w_f, e_f = mom["k_i"][0], mom["k_f"][0], mom["p_f"][0]
    return float(e**4 * eps_i.overlap(eps_f) ** 2 / (2**6 * np.pi**4 * w_i * w_f * m * e_f))


def null_trace_screens(proc: ScatterProcess, eps_i: PolarizationVector, eps_f: PolarizationVector) -> dict:
    """
    Traces containing eps_i p_i eps_i, p_i eps_f k_f and eps_f p_i eps_i, which vanish
    because p_i.eps = 0 at rest and eps.k = 0.
    """
    mom = proc.momenta
    m = proc.mass
    pi_s, pf_s = slash(mom["p_i"]), slash(mom["p_f"])
    kf_s, ki_s = slash(mom["k_f"]), slash(mom["k_i"])
    ei, ef = slash(eps_i.eps), slash(eps_f.eps)
    one = np.eye(DIM)
    pf_proj = pf_s @ (pf_s + m * one)
    return {
        "eps_i p_i eps_i": complex(np.trace(pf_proj @ ei @ pi_s @ ei @ ef @ ki_s)),
        "p_i eps_f k_f": complex(np.trace(pf_proj @ pi_s @ ef @ kf_s @ ei @ ef)),
        "eps_f p_i eps_i": complex(np.trace(pf_proj @ ef @ pi_s @ ei @ kf_s @ ei)),
    }
