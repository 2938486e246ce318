"""
Differential cross sections from squared amplitudes, next to their closed forms.

Natural units throughout; values are in 1/mass^2.  Multiply by
``BARN_CONVERSION`` (mb GeV^2) to get millibarn when masses are in GeV.
"""

from __future__ import annotations

import io
import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .amplitudes import (
    coulomb_field,
    coulomb_msq,
    compton_msq,
    coupling_from_alpha,
    moller_msq,
    relative_spread,
    ALPHA_DEFAULT,
)
from .errors import DkpError, KinematicsError, PipelineMismatch
from .kinematics import (
    cm_elastic,
    compton_lab,
    coulomb_elastic,
    mandelstam,
    polarization_basis,
)

BARN_CONVERSION = 0.3894  # mb GeV^2
DCS_RTOL = 1e-8
MIN_ANGLE_DEG = 1.0
FLOAT_FMT = "{:.17g}"


def _check(what, from_amp, closed, rtol):
    spread = relative_spread([from_amp, closed])
    if spread > rtol:
        raise PipelineMismatch(what, {"amplitude": from_amp, "closed": closed}, spread, rtol)
    return from_amp, closed


def coulomb_dcs(Z, E, p_mag, theta, e=None, rtol=DCS_RTOL):
    """(from-amplitude, closed-form) dsigma/dOmega for a charge Ze; mass from E^2 - p^2."""
    e = coupling_from_alpha(ALPHA_DEFAULT) if e is None else e
    if p_mag <= 0:
        raise KinematicsError("p_mag must be positive")
    if not 0 < theta < np.pi:
        raise KinematicsError(f"theta={theta!r} outside (0, pi)")
    m2 = E * E - p_mag * p_mag
    if m2 <= 0:
        raise KinematicsError("E must exceed p_mag for a massive particle")
    m = float(np.sqrt(m2))
    proc = coulomb_elastic(E, theta, m, coupling=e)
    msq = coulomb_msq(proc, coulomb_field(Z, e))
    from_amp = (2 * np.pi) ** 2 * E * E * msq
    closed = Z * Z * e**4 * E * E / (4 * p_mag**4 * np.sin(theta / 2) ** 4)
    return _check("coulomb dsigma/dOmega", from_amp, closed, rtol)


def moller_dcs_cm(s, theta, alpha=ALPHA_DEFAULT, m=1.0, rtol=DCS_RTOL):
    """cm-frame dsigma/dOmega; closed form alpha^2/(4s) |(s-t)/u + (s-u)/t|^2."""
    if s <= 4 * m * m:
        raise KinematicsError(f"s={s!r} not above threshold 4m^2={4 * m * m!r}")
    proc = cm_elastic(s, theta, m, coupling=coupling_from_alpha(alpha))
    energy = proc.incoming[0][0]
    from_amp = (2 * np.pi) ** 2 * energy**2 / 4 * moller_msq(proc)
    _, t, u = mandelstam(*proc.incoming, *proc.outgoing)
    closed = alpha**2 / (4 * s) * ((s - t) / u + (s - u) / t) ** 2
    return _check("moller dsigma/dOmega", from_amp, closed, rtol)


def _pol_pair(proc, pol):
    """``pol`` = (i, j) indexes the polarization bases of k_i and k_f (0: in-plane, 1: normal)."""
    mom = proc.momenta
    return polarization_basis(mom["k_i"])[pol[0]], polarization_basis(mom["k_f"])[pol[1]]


def compton_dcs_lab(omega_i, theta, m=1.0, pol=(0, 0), alpha=ALPHA_DEFAULT, rtol=DCS_RTOL):
    """
    Lab-frame dsigma/dOmega for fixed linear polarizations.

    ``pol`` is either a pair of basis indices or a pair of PolarizationVector.
    """
    proc = compton_lab(omega_i, theta, m, coupling=coupling_from_alpha(alpha))
    eps_i, eps_f = _pol_pair(proc, pol) if isinstance(pol[0], (int, np.integer)) else pol
    mom = proc.momenta
    w_f, e_f = mom["k_f"][0], mom["p_f"][0]
    parts = compton_msq(proc, eps_i, eps_f)
    from_amp = (2 * np.pi) ** 2 * w_f**3 * e_f / (m * omega_i) * parts.msq
    closed = alpha**2 * w_f**2 / (m * m * omega_i**2) * eps_i.overlap(eps_f) ** 2
    if max(abs(from_amp), abs(closed)) < 1e-300:
        return from_amp, closed
    scale = alpha**2 * w_f**2 / (m * m * omega_i**2)
    # perpendicular polarizations: compare on the scale of the aligned value
    if abs(from_amp - closed) > rtol * max(abs(from_amp), abs(closed), 1e-12 * scale):
        raise PipelineMismatch("compton dsigma/dOmega", {"amplitude": from_amp, "closed": closed},
                               abs(from_amp - closed) / max(abs(closed), 1e-12 * scale), rtol)
    return from_amp, closed


def compton_dcs_unpolarized(omega_i, theta, m=1.0, alpha=ALPHA_DEFAULT):
    """Average over initial, sum over final polarization basis states."""
    total = 0.0
    for a in (0, 1):
        for b in (0, 1):
            total += compton_dcs_lab(omega_i, theta, m, (a, b), alpha)[0]
    return 0.5 * total


def compton_dcs_unpolarized_pair(omega_i, theta, m=1.0, alpha=ALPHA_DEFAULT, rtol=DCS_RTOL):
    from_amp = compton_dcs_unpolarized(omega_i, theta, m, alpha)
    w_f = compton_lab(omega_i, theta, m).momenta["k_f"][0]
    closed = alpha**2 / (2 * m * m) * (w_f / omega_i) ** 2 * (1 + np.cos(theta) ** 2)
    return _check("compton unpolarized", from_amp, closed, rtol)


# -- tabulation ---------------------------------------------------------------------

@dataclass
class ProcessConfig:
    """What to tabulate; ``energies`` holds E (coulomb), s (moller) or omega_i (compton)."""

    process: str
    energies: Sequence[float]
    mass: float = 1.0
    alpha: float = ALPHA_DEFAULT
    Z: float = 1.0
    polarization: Optional[tuple] = None  # compton; None -> unpolarized
    rtol: float = DCS_RTOL

    @property
    def energy_name(self) -> str:
        return {"coulomb": "energy", "moller": "s", "compton": "omega_i"}[self.process]


@dataclass
class GridSpec:
    theta_min_deg: float = 10.0
    theta_max_deg: float = 170.0
    steps: int = 33
    min_angle_deg: float = MIN_ANGLE_DEG

    def angles_deg(self) -> np.ndarray:
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.steps == 1:
            return np.array([float(self.theta_min_deg)])
        return np.linspace(self.theta_min_deg, self.theta_max_deg, self.steps)


@dataclass
class CrossSectionTable:
    process: str
    parameters: dict
    columns: tuple
    rows: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    units: str = "1/mass^2 (natural units)"
    tolerances: dict = field(default_factory=lambda: {"pipeline_rtol": DCS_RTOL})

    @property
    def max_spread(self) -> float:
        return max((r["spread"] for r in self.rows), default=0.0)

    def scaled(self, factor: float, units: str) -> "CrossSectionTable":
        rows = []
        for r in self.rows:
            r = dict(r)
            r["amplitude"] *= factor
            r["closed"] *= factor
            rows.append(r)
        return CrossSectionTable(self.process, dict(self.parameters), self.columns, rows,
                                 list(self.errors), units, dict(self.tolerances))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for r in self.rows:
            writer.writerow([FLOAT_FMT.format(r[c]) for c in self.columns])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "process": self.process,
            "parameters": self.parameters,
            "code_version": __version__,
            "tolerances": self.tolerances,
            "units": self.units,
            "columns": list(self.columns),
            "rows": [[r[c] for c in self.columns] for r in self.rows],
            "max_spread": self.max_spread,
            "errors": self.errors,
        }
        return json.dumps(doc, indent=2, sort_keys=True)


def _evaluate(config: ProcessConfig, energy: float, theta_deg: float):
    theta = np.deg2rad(theta_deg)
    if config.process == "coulomb":
        p_mag = np.sqrt(energy**2 - config.mass**2) if energy > config.mass else 0.0
        return coulomb_dcs(config.Z, energy, p_mag, theta, coupling_from_alpha(config.alpha), config.rtol)
    if config.process == "moller":
        return moller_dcs_cm(energy, theta, config.alpha, config.mass, config.rtol)
    if config.process == "compton":
        if config.polarization is None:
            return compton_dcs_unpolarized_pair(energy, theta, config.mass, config.alpha, config.rtol)
        return compton_dcs_lab(energy, theta, config.mass, config.polarization, config.alpha, config.rtol)
    raise ValueError(f"unknown process {config.process!r}")


def tabulate(config: ProcessConfig, grid: GridSpec, workers: int = 1) -> CrossSectionTable:
    """Evaluate both pipelines on every (energy, theta) point; point failures are recorded."""
    angles = grid.angles_deg()
    if config.process in ("coulomb", "moller"):
        lo = grid.min_angle_deg
        angles = angles[(angles >= lo) & (angles <= 180.0 - lo)]
    points = [(float(en), float(th)) for en in config.energies for th in angles]

    def work(point):
        try:
            return point, _evaluate(config, *point), None
        except DkpError as exc:
            return point, None, f"{type(exc).__name__}: {exc}"

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, points))
    else:
        results = [work(p) for p in points]

    ename = config.energy_name
    columns = (ename, "theta_deg", "amplitude", "closed", "spread")
    params = {
        "mass": config.mass,
        "alpha": config.alpha,
        ename: [float(x) for x in config.energies],
        "theta_min_deg": grid.theta_min_deg,
        "theta_max_deg": grid.theta_max_deg,
        "steps": grid.steps,
        "min_angle_deg": grid.min_angle_deg,
    }
    if config.process == "coulomb":
        params["Z"] = config.Z
    if config.process == "compton":
        params["polarization"] = "unpolarized" if config.polarization is None else list(config.polarization)
    table = CrossSectionTable(config.process, params, columns, tolerances={"pipeline_rtol": config.rtol})
    for (energy, theta_deg), vals, err in results:
        if err is not None:
            table.errors.append({ename: energy, "theta_deg": theta_deg, "error": err})
            continue
        amp, closed = vals
        table.rows.append({
            ename: energy,
            "theta_deg": theta_deg,
            "amplitude": float(amp),
            "closed": float(closed),
            "spread": relative_spread([amp, closed]),
        })
    return table
