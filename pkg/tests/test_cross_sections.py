import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sdkp.amplitudes import ALPHA_DEFAULT
from sdkp.cross_sections import (
    BARN_CONVERSION,
    GridSpec,
    ProcessConfig,
    compton_dcs_lab,
    compton_dcs_unpolarized,
    compton_dcs_unpolarized_pair,
    coulomb_dcs,
    moller_dcs_cm,
    tabulate,
)
from sdkp.errors import KinematicsError
from sdkp.kinematics import compton_lab, polarization_basis

ALPHA = ALPHA_DEFAULT


def test_coulomb_rutherford_like():
    amp, closed = coulomb_dcs(1, 2.0, np.sqrt(3.0), np.pi / 2)
    e4 = (4 * np.pi * ALPHA) ** 2
    assert closed == pytest.approx(e4 * 4 / (4 * 9 * 0.25))
    assert amp == pytest.approx(closed, rel=1e-12)


def test_coulomb_scales_with_z_squared():
    a = coulomb_dcs(1, 3.0, np.sqrt(8.0), 0.9)[0]
    b = coulomb_dcs(3, 3.0, np.sqrt(8.0), 0.9)[0]
    assert b / a == pytest.approx(9.0)


def test_coulomb_preconditions():
    with pytest.raises(KinematicsError):
        coulomb_dcs(1, 1.0, 0.0, 1.0)
    with pytest.raises(KinematicsError):
        coulomb_dcs(1, 1.0, 2.0, 1.0)
    with pytest.raises(KinematicsError):
        coulomb_dcs(1, 2.0, 1.0, 0.0)


def test_moller_massless_limit():
    s = 1e6
    amp, closed = moller_dcs_cm(s, np.pi / 2)
    assert amp == pytest.approx(9 * ALPHA**2 / s, rel=1e-4)


@settings(max_examples=30, deadline=None)
@given(st.floats(4.5, 200.0), st.floats(0.1, np.pi - 0.1))
def test_moller_pipelines(s, theta):
    amp, closed = moller_dcs_cm(s, theta)
    assert amp == pytest.approx(closed, rel=1e-8)


def test_moller_below_threshold():
    with pytest.raises(KinematicsError):
        moller_dcs_cm(3.9, 1.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-3, 20.0), st.floats(0.0, np.pi), st.integers(0, 1), st.integers(0, 1))
def test_compton_polarized(w, theta, a, b):
    amp, closed = compton_dcs_lab(w, theta, 1.0, (a, b))
    scale = ALPHA**2
    assert abs(amp - closed) <= 1e-8 * max(abs(closed), 1e-12 * scale)


def test_compton_normal_polarization_is_angle_independent_in_thomson_limit():
    vals = [compton_dcs_lab(1e-6, th, 1.0, (1, 1))[0] for th in (0.3, 1.2, 2.5)]
    np.testing.assert_allclose(vals, ALPHA**2, rtol=1e-5)


def test_compton_explicit_polarization_vectors():
    proc = compton_lab(1.0, 0.8, 1.0)
    ei = polarization_basis(proc.momenta["k_i"])[0]
    ef = polarization_basis(proc.momenta["k_f"])[0]
    amp, closed = compton_dcs_lab(1.0, 0.8, 1.0, (ei, ef))
    assert amp == pytest.approx(compton_dcs_lab(1.0, 0.8, 1.0, (0, 0))[0])


@pytest.mark.parametrize("w", [1e-3, 0.5, 1.0, 10.0])
def test_compton_unpolarized(w):
    for theta in np.linspace(0.0, np.pi, 7):
        amp, closed = compton_dcs_unpolarized_pair(w, theta)
        assert amp == pytest.approx(closed, rel=1e-8)


def test_compton_approach_to_thomson():
    # the departure from the Thomson form is the recoil factor (w_f/w_i)^2
    for w in (1e-2, 1e-4, 1e-6):
        for theta in np.linspace(0.1, 3.0, 5):
            ratio = compton_dcs_unpolarized(w, theta) / (ALPHA**2 / 2 * (1 + np.cos(theta) ** 2))
            assert 1 - ratio == pytest.approx(2 * w * (1 - np.cos(theta)), rel=3 * w + 1e-6)


def test_grid_spec():
    np.testing.assert_allclose(GridSpec(10, 170, 33).angles_deg()[[0, -1]], [10, 170])
    assert GridSpec(90, 90, 1).angles_deg().tolist() == [90.0]
    with pytest.raises(ValueError):
        GridSpec(steps=0).angles_deg()


def test_tabulate_moller():
    table = tabulate(ProcessConfig("moller", [10.0, 50.0]), GridSpec(10, 170, 9))
    assert len(table.rows) == 18
    assert table.max_spread < 1e-8
    assert table.columns[0] == "s"
    csv_text = table.to_csv()
    assert csv_text.count("\n") == 19


def test_tabulate_excludes_poles():
    table = tabulate(ProcessConfig("moller", [10.0]), GridSpec(0, 180, 181, min_angle_deg=1.0))
    angles = [r["theta_deg"] for r in table.rows]
    assert min(angles) == 1.0 and max(angles) == 179.0
    # compton has no pole; full range kept
    table = tabulate(ProcessConfig("compton", [1.0]), GridSpec(0, 180, 5))
    assert len(table.rows) == 5


def test_tabulate_records_failures():
    table = tabulate(ProcessConfig("coulomb", [0.5]), GridSpec(10, 20, 2))
    assert not table.rows
    assert len(table.errors) == 2


def test_parallel_tabulation_is_identical():
    cfg = ProcessConfig("compton", [0.1, 1.0, 5.0], polarization=(0, 1))
    grid = GridSpec(0, 180, 13)
    assert tabulate(cfg, grid, workers=4).to_csv() == tabulate(cfg, grid).to_csv()


def test_json_and_barn():
    table = tabulate(ProcessConfig("coulomb", [2.0], Z=2), GridSpec(30, 150, 3))
    doc = json.loads(table.to_json())
    assert doc["parameters"]["Z"] == 2
    assert doc["tolerances"]["pipeline_rtol"] == 1e-8
    assert len(doc["rows"]) == 3
    mb = table.scaled(BARN_CONVERSION, "mb")
    assert mb.rows[0]["amplitude"] == pytest.approx(table.rows[0]["amplitude"] * BARN_CONVERSION)
    assert mb.units == "mb"
