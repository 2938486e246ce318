"""Invariant suites run by ``sdkp verify``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .amplitudes import (
    compton_msq,
    coulomb_field,
    coulomb_msq_pipelines,
    moller_msq_pipelines,
)
from .dkp_algebra import BetaSet, beta_string_trace, build_beta_representation, slash, trace_identity
from .distributions import (
    dkp_commutator,
    dkp_feynman,
    fix_gauge_constant,
    jordan_pauli,
    singular_order,
    split,
)
from .kinematics import cm_elastic, compton_lab, coulomb_elastic, msq, polarization_basis
from .spinors import outer_bar, projector, solve_u

DEFAULT_TOLERANCES = {
    "algebra": 1e-12,
    "trace_odd": 1e-12,
    "trace_even": 1e-10,
    "slash_cube": 1e-10,
    "projector": 1e-10,
    "normalization": 1e-12,
    "propagator": 1e-10,
    "pipelines": 1e-8,
    "compton_nul": 1e-10,
}


@dataclass
class SuiteResult:
    name: str
    residual: float
    tolerance: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual < self.tolerance)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" [{self.detail}]" if self.detail else ""
        return f"{self.name:<28s} residual {self.residual:.1e} (tol {self.tolerance:.0e}) {status}{extra}"


def random_on_shell(rng, m, pmax_ratio=100.0):
    p0 = m * rng.uniform(1.0, pmax_ratio)
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    return np.concatenate(([p0], np.sqrt(p0 * p0 - m * m) * direction))


def random_off_shell(rng, m):
    while True:
        q = rng.normal(scale=3 * m, size=4)
        if abs(msq(q) - m * m) > 1e-3 * m * m:
            return q


def corrupt(betas: BetaSet, amount: float = 1e-3) -> BetaSet:
    beta = np.array(betas.beta)
    beta[1, 0, 2] += amount
    return BetaSet(beta=beta, eta0=np.array(betas.eta0), metric=betas.metric)


def suite_algebra(b, tol, rng):
    res = max(b.algebra_residual(), b.eta0_residual(), b.eta0_involution_residual(), b.hermiticity_residual())
    return SuiteResult("algebra residual", res, tol["algebra"], "64 triples, eta0, hermiticity")


def suite_traces(b, tol, rng, n=500):
    odd = 0.0
    for _ in range(n):
        length = int(rng.choice([1, 3, 5, 7]))
        odd = max(odd, abs(beta_string_trace(rng.integers(0, 4, length), b)))
    even = 0.0
    for _ in range(n):
        length = int(rng.choice([2, 4, 6, 8]))
        idx = rng.integers(0, 4, length)
        even = max(even, abs(beta_string_trace(idx, b) - trace_identity(idx)))
    return [
        SuiteResult("trace odd strings", odd, tol["trace_odd"], f"{n} samples"),
        SuiteResult("trace even strings", even, tol["trace_even"], f"{n} samples"),
    ]


def suite_slash(b, tol, rng, n=100, m=1.0):
    worst = 0.0
    for _ in range(n):
        q = rng.normal(size=4) * 3
        qs = slash(q, b)
        scale = max(1.0, np.max(np.abs(qs)))
        cube = qs @ qs @ qs - msq(q) * qs
        ident = (qs - m * np.eye(5)) @ qs @ (qs + m * np.eye(5)) - (msq(q) - m * m) * qs
        worst = max(worst, np.max(np.abs(cube)) / scale**3, np.max(np.abs(ident)) / scale**3)
    return SuiteResult("slash cube identity", float(worst), tol["slash_cube"], f"{n} samples")


def suite_projector(b, tol, rng, n=200, m=1.0):
    worst = norm = 0.0
    for _ in range(n):
        p = random_on_shell(rng, m)
        u = solve_u(p, "-", m, b).components
        worst = max(worst, float(np.max(np.abs(outer_bar(u, b) - projector(p, m, b)))))
        norm = max(norm, abs((u.conj() @ b.eta0 @ b.beta[0] @ u) - 1.0))
    return [
        SuiteResult("projector u ubar", worst, tol["projector"], f"{n} momenta"),
        SuiteResult("spinor normalization", float(norm), tol["normalization"]),
    ]


def suite_singular_orders(b, tol, rng):
    m = 1.0
    cases = [("D_0", jordan_pauli(0.0), -2, 0), ("D_m", jordan_pauli(m), -2, 0), ("S", dkp_commutator(m, betas=b), 0, 1)]
    worst = 0.0
    omegas = []
    for _, d, omega, n_const in cases:
        got = singular_order(d).omega
        res = split(d)
        omegas.append(got)
        worst = max(worst, abs(got - omega), abs(res.n_constants - n_const))
    detail = "omega " + ", ".join(f"{name}={w}" for (name, *_), w in zip(cases, omegas))
    return SuiteResult("singular orders", float(worst), 0.5, detail)


def suite_propagator(b, tol, rng, n=200, m=1.0):
    worst = 0.0
    for _ in range(n):
        q = random_off_shell(rng, m)
        qs = slash(q, b)
        lhs = (qs - m * np.eye(5)) @ dkp_feynman(q, m, None, b).value + qs / m
        worst = max(worst, float(np.max(np.abs(lhs)) / max(1.0, np.max(np.abs(qs / m)))))
    gauge = float(np.max(np.abs(fix_gauge_constant(m) * m - np.eye(5))))
    return [
        SuiteResult("propagator identity", worst, tol["propagator"], f"{n} off-shell q"),
        SuiteResult("gauge constant C*m = I", gauge, 1e-15),
    ]


def suite_pipelines(b, tol, rng):
    worst_c = max(
        coulomb_msq_pipelines(coulomb_elastic(E, th, 1.0), coulomb_field(1)).spread
        for E in (1.1, 2.0, 10.0) for th in (0.3, 1.5, 2.8)
    )
    worst_m = max(
        moller_msq_pipelines(cm_elastic(s, th, 1.0)).spread
        for s in (5.0, 10.0, 100.0) for th in (0.3, 1.5, 2.8)
    )
    worst_nul = 0.0
    for w in (0.01, 1.0, 10.0):
        for th in (0.3, 1.5, 2.8):
            proc = compton_lab(w, th, 1.0)
            ei = polarization_basis(proc.momenta["k_i"])[1]
            ef = polarization_basis(proc.momenta["k_f"])[1]
            parts = compton_msq(proc, ei, ef)
            worst_nul = max(worst_nul, parts.msq_b / parts.msq_a, abs(parts.cross) / parts.msq_a)
    return [
        SuiteResult("coulomb pipelines", worst_c, tol["pipelines"]),
        SuiteResult("moller pipelines", worst_m, tol["pipelines"]),
        SuiteResult("compton M_b cancellation", worst_nul, tol["compton_nul"]),
    ]


SUITES: list[Callable] = [
    suite_algebra,
    suite_traces,
    suite_slash,
    suite_projector,
    suite_singular_orders,
    suite_propagator,
    suite_pipelines,
]


def run_all(betas: BetaSet | None = None, tolerances: dict | None = None, seed: int = 20240101) -> list[SuiteResult]:
    b = build_beta_representation() if betas is None else betas
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    rng = np.random.default_rng(seed)
    results = []
    for suite in SUITES:
        try:
            out = suite(b, tol, rng)
        except Exception as exc:  # a corrupted algebra may break solvers outright
            out = SuiteResult(suite.__name__.removeprefix("suite_"), float("inf"), 0.0, f"{type(exc).__name__}: {exc}")
        results.extend(out if isinstance(out, list) else [out])
    return results
