"""End-to-end acceptance checks, each at its stated tolerance."""

import subprocess
import sys
import time

import numpy as np
import pytest

from sdkp.amplitudes import ALPHA_DEFAULT, compton_msq, moller_closed, moller_trace
from sdkp.cross_sections import compton_dcs_lab, compton_dcs_unpolarized, coulomb_dcs, moller_dcs_cm
from sdkp.distributions import dkp_commutator, dkp_feynman, fix_gauge_constant, jordan_pauli, singular_order, split
from sdkp.dkp_algebra import beta_string_trace, build_beta_representation, slash, trace_identity
from sdkp.kinematics import cm_elastic, compton_lab, polarization_basis
from sdkp.spinors import outer_bar, projector, solve_u
from sdkp.verification import random_off_shell, random_on_shell

ALPHA = ALPHA_DEFAULT


def test_algebra(acceptance):
    start = time.perf_counter()
    b = build_beta_representation()
    residual = b.algebra_residual()
    eta_exact = np.array_equal(b.eta0, 2 * b.beta[0] @ b.beta[0] - np.eye(5))
    herm_exact = all(np.array_equal(b.beta[mu].conj().T, b.eta0 @ b.beta[mu] @ b.eta0) for mu in range(4))
    elapsed = time.perf_counter() - start
    ok = residual < 1e-12 and eta_exact and herm_exact and elapsed < 1.0
    acceptance(1, "DKP algebra", ok,
               f"64-triple residual {residual:.1e}, eta0 exact={eta_exact}, "
               f"hermiticity exact={herm_exact}, {elapsed:.3f} s")
    assert ok


def test_traces(acceptance):
    rng = np.random.default_rng(2)
    b = build_beta_representation()
    start = time.perf_counter()
    odd = max(abs(beta_string_trace(rng.integers(0, 4, rng.choice([1, 3, 5, 7])), b)) for _ in range(500))
    even = 0.0
    for _ in range(500):
        idx = rng.integers(0, 4, rng.choice([2, 4, 6, 8]))
        even = max(even, abs(beta_string_trace(idx, b) - trace_identity(idx)))
    elapsed = time.perf_counter() - start
    ok = odd < 1e-12 and even < 1e-10 and elapsed < 10.0
    acceptance(2, "trace oracle", ok, f"odd max {odd:.1e}, even max diff {even:.1e}, {elapsed:.2f} s")
    assert ok


def test_projector(acceptance):
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(200):
        m = rng.uniform(0.1, 10.0)
        p = random_on_shell(rng, m, 100.0)
        worst = max(worst, float(np.max(np.abs(outer_bar(solve_u(p, "-", m)) - projector(p, m)))))
    ok = worst < 1e-10
    acceptance(3, "projector oracle", ok, f"max entry error {worst:.1e} over 200 momenta")
    assert ok


def test_singular_orders(acceptance):
    omegas = (singular_order(jordan_pauli(0.0)).omega, singular_order(jordan_pauli(1.0)).omega,
              singular_order(dkp_commutator(1.0)).omega)
    consts = (split(jordan_pauli(0.0)).n_constants, split(jordan_pauli(1.0)).n_constants,
              split(dkp_commutator(1.0)).n_constants)
    ok = omegas == (-2, -2, 0) and consts == (0, 0, 1)
    acceptance(4, "singular orders", ok, f"omega (D_0, D_m, S) = {omegas}, free constants {consts}")
    assert ok


def test_gauge_constant_and_propagator(acceptance):
    exact = all(np.array_equal(fix_gauge_constant(m) * m, np.eye(5)) for m in (0.25, 0.5, 1.0, 2.0, 4.0, 8.0))
    rng = np.random.default_rng(5)
    ulp = max(float(np.max(np.abs(fix_gauge_constant(m) * m - np.eye(5)))) for m in rng.uniform(0.01, 100, 200))
    worst = 0.0
    for _ in range(200):
        m = rng.uniform(0.2, 5.0)
        q = random_off_shell(rng, m)
        qs = slash(q)
        lhs = (qs - m * np.eye(5)) @ dkp_feynman(q, m, np.zeros((5, 5))).value
        worst = max(worst, float(np.max(np.abs(lhs + qs / m)) / np.max(np.abs(qs / m))))
    ok = exact and ulp <= np.finfo(float).eps and worst < 1e-10
    acceptance(5, "gauge constant and propagator", ok,
               f"C*m == I exact={exact} (random m within {ulp:.1e}), propagator rel {worst:.1e}")
    assert ok


def test_coulomb(acceptance):
    worst = 0.0
    for ratio in np.linspace(1.1, 10.0, 10):
        for theta in np.deg2rad(np.linspace(10, 170, 10)):
            p_mag = np.sqrt(ratio**2 - 1.0)
            amp, closed = coulomb_dcs(1, ratio, p_mag, theta, rtol=np.inf)
            worst = max(worst, abs(amp - closed) / abs(closed))
    ok = worst < 1e-8
    acceptance(6, "Coulomb", ok, f"max relative deviation {worst:.1e} over 10x10 grid")
    assert ok


def test_moller(acceptance):
    worst = 0.0
    for s in np.linspace(5.0, 100.0, 10):
        for theta in np.deg2rad(np.linspace(10, 170, 10)):
            proc = cm_elastic(s, theta, 1.0)
            tr, cl = moller_trace(proc), moller_closed(proc)
            worst = max(worst, abs(tr - cl) / abs(cl))
    s = 1e6
    spot = moller_dcs_cm(s, np.pi / 2, ALPHA, 1.0)[0]
    spot_dev = abs(spot / (9 * ALPHA**2 / s) - 1)
    ok = worst < 1e-8 and spot_dev < 1e-4
    acceptance(7, "Moller", ok, f"trace vs closed max {worst:.1e}; 9 alpha^2/s spot deviation {spot_dev:.1e}")
    assert ok


def test_compton(acceptance):
    ratio_b = ratio_cross = dcs_dev = 0.0
    points = 0
    for w in np.geomspace(1e-3, 30.0, 10):
        for theta in np.deg2rad([5, 30, 60, 100, 135, 175]):
            proc = compton_lab(w, theta, 1.0)
            bi = polarization_basis(proc.momenta["k_i"])
            bf = polarization_basis(proc.momenta["k_f"])
            for a, b in ((0, 0), (1, 1)):
                parts = compton_msq(proc, bi[a], bf[b])
                ratio_b = max(ratio_b, parts.msq_b / parts.msq_a)
                ratio_cross = max(ratio_cross, abs(parts.cross) / parts.msq_a)
            for a in (0, 1):
                for b in (0, 1):
                    amp, closed = compton_dcs_lab(w, theta, 1.0, (a, b), ALPHA, rtol=np.inf)
                    scale = max(abs(closed), 1e-12 * ALPHA**2)
                    dcs_dev = max(dcs_dev, abs(amp - closed) / scale)
            points += 1
    thomson_dev, worst_theta = 0.0, 0.0
    for theta in np.linspace(0.0, np.pi, 19):
        got = compton_dcs_unpolarized(1e-4, theta, 1.0, ALPHA)
        dev = abs(got / (ALPHA**2 / 2 * (1 + np.cos(theta) ** 2)) - 1)
        if dev > thomson_dev:
            thomson_dev, worst_theta = dev, np.rad2deg(theta)
    ok = (points >= 50 and ratio_b < 1e-10 and ratio_cross < 1e-10
          and dcs_dev < 1e-8 and thomson_dev < 1e-4)
    acceptance(8, "Compton", ok,
               f"{points} points, |M_b|^2/|M_a|^2 {ratio_b:.1e}, cross {ratio_cross:.1e}, "
               f"dsigma vs closed {dcs_dev:.1e}, Thomson max deviation {thomson_dev:.1e} "
               f"at {worst_theta:.0f} deg (recoil factor (w_f/w_i)^2)")
    assert ok


def test_determinism(acceptance, tmp_path):
    outputs = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        subprocess.run(
            [sys.executable, "-m", "sdkp", "xsec", "moller", "--s", "10", "50",
             "--theta-min", "10", "--theta-max", "170", "--steps", "33", "--workers", "4", "--out", str(path)],
            check=True, capture_output=True,
        )
        outputs.append(path.read_bytes())
    ok = outputs[0] == outputs[1] and len(outputs[0]) > 0
    acceptance(9, "determinism", ok, f"two CLI runs byte-identical ({len(outputs[0])} bytes)")
    assert ok
