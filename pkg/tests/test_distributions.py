import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sdkp.dkp_algebra import slash
from sdkp.distributions import (
    DistributionDescriptor,
    PolynomialTerm,
    dkp_commutator,
    dkp_feynman,
    fix_gauge_constant,
    gauge_condition_residual,
    jordan_pauli,
    photon_feynman,
    scalar_descriptor,
    singular_order,
    split,
)
from sdkp.errors import GaugeError, PoleError, UnsupportedDistribution
from sdkp.kinematics import four_vector, msq
from sdkp.verification import random_off_shell


def test_singular_orders_of_tree_distributions():
    assert singular_order(jordan_pauli(0.0)).omega == -2
    assert singular_order(jordan_pauli(1.0)).omega == -2
    assert singular_order(dkp_commutator(1.0)).omega == 0


def test_split_constants():
    assert split(jordan_pauli(0.0)).n_constants == 0
    assert split(jordan_pauli(2.0)).classification == "regular"
    res = split(dkp_commutator(1.0))
    assert res.classification == "singular"
    assert res.n_constants == 1
    assert res.retarded.constant_slots == ((5, 5),)
    assert "C_0" in res.retarded.describe()


@pytest.mark.parametrize("degree, n", [(2, 1), (3, 5), (4, 15)])
def test_constant_count_grows_with_omega(degree, n):
    assert split(scalar_descriptor(degree, 1.0)).n_constants == n


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 6), st.floats(0.0, 10.0), st.sampled_from(["sgn", "theta+", "theta-"]))
def test_omega_is_degree_minus_two(degree, m, freq):
    d = scalar_descriptor(degree, m, freq)
    assert singular_order(d).omega == degree - 2
    assert split(d).regular == (degree < 2)


def test_commutator_polynomial_matches_slash():
    m = 1.5
    d = dkp_commutator(m)
    p = four_vector(3.0, 0.4, -1.0, 2.0)
    ps = slash(p)
    expected = 1j / (2 * np.pi * m) * ps @ (ps + m * np.eye(5))
    np.testing.assert_allclose(d.polynomial(p), expected, atol=1e-13)


def test_zero_polynomial_rejected():
    d = DistributionDescriptor("zero", (PolynomialTerm(np.zeros((4, 4)), 2),))
    with pytest.raises(UnsupportedDistribution):
        singular_order(d)


def test_unsupported_support_rejected():
    d = DistributionDescriptor("loop", (PolynomialTerm(np.array(1.0), 0),), support="two-point")
    with pytest.raises(UnsupportedDistribution):
        split(d)


def test_descriptor_validation():
    with pytest.raises(ValueError):
        jordan_pauli(1.0, "sideways")
    with pytest.raises(ValueError):
        PolynomialTerm(np.zeros((3, 3)), 1)


def test_propagator_identity():
    rng = np.random.default_rng(11)
    for _ in range(100):
        m = rng.uniform(0.3, 3.0)
        q = random_off_shell(rng, m)
        qs = slash(q)
        lhs = (qs - m * np.eye(5)) @ dkp_feynman(q, m).value
        np.testing.assert_allclose(lhs, -qs / m, atol=1e-10 * max(1.0, np.abs(qs).max() / m))


def test_propagator_with_constant_adds():
    q = four_vector(2.0, 0.3, 0.0, 0.1)
    c = fix_gauge_constant(1.0)
    np.testing.assert_allclose(dkp_feynman(q, 1.0, c).value, dkp_feynman(q, 1.0).value + c)
    assert dkp_feynman(q, 1.0).prescription == "+i0"


def test_poles_raise():
    with pytest.raises(PoleError):
        dkp_feynman(four_vector(1.0), 1.0)
    with pytest.raises(PoleError):
        photon_feynman(four_vector(1.0, 0, 0, 1.0))
    assert photon_feynman(four_vector(0.0, 0, 0, 2.0)) == pytest.approx(0.25)


@pytest.mark.parametrize("m", [0.5, 1.0, 2.0, 4.0])
def test_gauge_constant_exact(m):
    c = fix_gauge_constant(m)
    assert np.array_equal(c * m, np.eye(5))
    assert gauge_condition_residual(c, m) == 0.0


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-3, 1e3))
def test_gauge_constant_within_rounding(m):
    assert np.max(np.abs(fix_gauge_constant(m) * m - np.eye(5))) <= 2.3e-16


def test_gauge_constant_errors():
    with pytest.raises(GaugeError):
        fix_gauge_constant(0.0)
    with pytest.raises(ValueError):
        fix_gauge_constant(-1.0)
    assert gauge_condition_residual(np.zeros((5, 5)), 2.0) == 0.5


def test_slash_pole_structure():
    # (q - m) q (q + m) = (q^2 - m^2) q
    rng = np.random.default_rng(12)
    for _ in range(20):
        q = rng.normal(size=4)
        qs, m = slash(q), 0.7
        np.testing.assert_allclose(
            (qs - m * np.eye(5)) @ qs @ (qs + m * np.eye(5)), (msq(q) - m * m) * qs, atol=1e-12
        )
