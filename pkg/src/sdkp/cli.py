"""
Command-line entry point.

    sdkp verify [--corrupt-beta]
    sdkp xsec {coulomb,moller,compton} [process flags] [grid flags] --out PATH|-
    sdkp singular-order "delta m=1 deg=2 sgn"

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.
Defaults can be overridden with a key=value file passed via ``--config``;
``--show-config`` prints the effective values.  Relative output paths are
resolved against $SDKP_OUTPUT_DIR when it is set.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

from .amplitudes import ALPHA_DEFAULT, alpha_from_coupling
from .cross_sections import BARN_CONVERSION, DCS_RTOL, MIN_ANGLE_DEG, GridSpec, ProcessConfig, tabulate
from .distributions import FREQUENCY_TAGS, scalar_descriptor, split
from .errors import DkpError
from .verification import DEFAULT_TOLERANCES, corrupt, run_all
from .dkp_algebra import build_beta_representation

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
OUTPUT_DIR_ENV = "SDKP_OUTPUT_DIR"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Effective settings of one invocation; every field may come from a config file."""

    subcommand: str = ""
    process: str = ""
    alpha: float = ALPHA_DEFAULT
    mass: float = 1.0
    Z: float = 1.0
    energies: list = field(default_factory=list)
    theta_min_deg: float = 10.0
    theta_max_deg: float = 170.0
    steps: int = 33
    min_angle_deg: float = MIN_ANGLE_DEG
    unpolarized: bool = False
    pol_i: int = 1
    pol_f: int = 1
    out: str = "-"
    format: str = ""
    barn: bool = False
    barn_conversion: float = BARN_CONVERSION
    pipeline_rtol: float = DCS_RTOL
    workers: int = 1

    def validate(self):
        if self.alpha <= 0:
            raise UsageError(f"--alpha must be positive, got {self.alpha}")
        if self.mass <= 0:
            raise UsageError(f"--mass must be positive, got {self.mass}")
        if self.steps < 1:
            raise UsageError(f"--steps must be >= 1, got {self.steps}")
        if not 0 <= self.theta_min_deg <= self.theta_max_deg <= 180:
            raise UsageError(
                f"need 0 <= --theta-min <= --theta-max <= 180, got {self.theta_min_deg}, {self.theta_max_deg}"
            )
        if self.pol_i not in (1, 2) or self.pol_f not in (1, 2):
            raise UsageError("--pol-i/--pol-f must be 1 (in-plane) or 2 (normal to the plane)")
        if self.format not in ("", "csv", "json"):
            raise UsageError(f"--format must be csv or json, got {self.format!r}")
        m = self.mass
        for x in self.energies:
            if self.process == "coulomb" and x <= m:
                raise UsageError(f"--energy {x} must exceed the mass {m}")
            if self.process == "moller" and x <= 4 * m * m:
                raise UsageError(f"--s {x} must exceed the threshold 4 m^2 = {4 * m * m}")
            if self.process == "compton" and x <= 0:
                raise UsageError(f"--omega-i {x} must be positive")


def _coerce(name, raw: str):
    kinds = {f.name: f.type for f in fields(RunConfig)}
    if name not in kinds:
        raise UsageError(f"unknown config key {name!r}")
    kind = kinds[name]
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
        if kind == "bool":
            if raw.lower() not in ("1", "0", "true", "false", "yes", "no"):
                raise ValueError(raw)
            return raw.lower() in ("1", "true", "yes")
        if kind == "list":
            return [float(x) for x in raw.replace(",", " ").split()]
        return raw
    except ValueError:
        raise UsageError(f"config key {name!r}: cannot parse {raw!r}") from None


def read_config_file(path) -> dict:
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, raw = (s.strip() for s in line.split("=", 1))
        values[key] = _coerce(key, raw)
    return values


# -- singular-order mini grammar ----------------------------------------------------

_TOKEN = re.compile(r"\S+")


def parse_descriptor(spec: str):
    """
    ``<support> m=<mass> deg=<degree> <freq>``, e.g. ``delta m=1 deg=2 sgn``.
    Raises UsageError naming the character position of the offending token.
    """
    tokens = [(m.group(), m.start()) for m in _TOKEN.finditer(spec)]
    if not tokens:
        raise UsageError("empty descriptor at position 0")
    support, _ = tokens[0]
    mass = degree = None
    freq = "sgn"
    for tok, pos in tokens[1:]:
        if tok.startswith("m="):
            try:
                mass = float(tok[2:])
            except ValueError:
                raise UsageError(f"bad mass {tok!r} at position {pos}") from None
            if mass < 0:
                raise UsageError(f"negative mass at position {pos}")
        elif tok.startswith("deg="):
            try:
                degree = int(tok[4:])
            except ValueError:
                raise UsageError(f"bad degree {tok!r} at position {pos}") from None
            if degree < 0:
                raise UsageError(f"negative degree at position {pos}")
        elif tok in FREQUENCY_TAGS:
            freq = tok
        else:
            raise UsageError(f"unexpected token {tok!r} at position {pos}")
    if degree is None:
        raise UsageError(f"missing deg=<n> (end of input at position {len(spec)})")
    d = scalar_descriptor(degree, mass or 0.0, freq, name=spec.strip())
    return d if support == d.support else _with_support(d, support)


def _with_support(d, support):
    from dataclasses import replace

    return replace(d, support=support)


# -- subcommands ----------------------------------------------------------------------

def cmd_verify(args, cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    betas = build_beta_representation()
    if args.corrupt_beta:
        betas = corrupt(betas)
    tolerances = dict(DEFAULT_TOLERANCES)
    for item in args.tol or []:
        key, _, raw = item.partition("=")
        if key not in tolerances:
            raise UsageError(f"unknown tolerance {key!r}; choose from {sorted(tolerances)}")
        tolerances[key] = float(raw)
    results = run_all(betas, tolerances, seed=args.seed)
    for r in results:
        print(r.line(), file=out)
    ok = all(r.passed for r in results)
    print("ALL PASS" if ok else "VERIFICATION FAILED", file=out)
    return EXIT_OK if ok else EXIT_VERIFY


def _resolve_out(path: str) -> Optional[Path]:
    if path == "-":
        return None
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def cmd_xsec(args, cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    cfg.validate()
    if not cfg.energies:
        flag = {"coulomb": "--energy", "moller": "--s", "compton": "--omega-i"}[cfg.process]
        raise UsageError(f"{flag} is required for {cfg.process}")
    polarization = None if cfg.unpolarized else (cfg.pol_i - 1, cfg.pol_f - 1)
    pconf = ProcessConfig(cfg.process, cfg.energies, cfg.mass, cfg.alpha, cfg.Z, polarization, cfg.pipeline_rtol)
    grid = GridSpec(cfg.theta_min_deg, cfg.theta_max_deg, cfg.steps, cfg.min_angle_deg)
    table = tabulate(pconf, grid, workers=cfg.workers)
    if cfg.barn:
        table = table.scaled(cfg.barn_conversion, "mb (masses in GeV)")

    target = _resolve_out(cfg.out)
    fmt = cfg.format or ("json" if target is not None and target.suffix == ".json" else "csv")
    text = table.to_json() + "\n" if fmt == "json" else table.to_csv()
    if target is None:
        out.write(text)
        summary = sys.stderr
    else:
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(text)
        except OSError as exc:
            print(f"error: cannot write {target}: {exc}", file=sys.stderr)
            return EXIT_IO
        summary = out
    print(
        f"{table.process}: {len(table.rows)} points, {len(table.errors)} failed, max spread {table.max_spread:.2e}",
        file=summary,
    )
    for err in table.errors:
        print(f"  point failed: {err}", file=sys.stderr)
    return EXIT_OK


def cmd_singular_order(args, cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    d = parse_descriptor(args.descriptor)
    try:
        res = split(d)
    except DkpError as exc:
        raise UsageError(str(exc)) from None
    print(f"omega={res.omega} {res.classification} constants={res.n_constants}", file=out)
    print(f"retarded part: {res.retarded.describe()}", file=out)
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sdkp", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--config", help="key=value file overriding defaults")
    parser.add_argument("--show-config", action="store_true", help="print effective configuration and exit")
    sub = parser.add_subparsers(dest="subcommand")

    v = sub.add_parser("verify", help="run the invariant suites")
    v.add_argument("--corrupt-beta", action="store_true", help="test mode: perturb beta^1 before verifying")
    v.add_argument("--seed", type=int, default=20240101)
    v.add_argument("--tol", action="append", metavar="NAME=VALUE", help="tolerance override")

    x = sub.add_parser("xsec", help="tabulate differential cross sections")
    x.add_argument("process", choices=["coulomb", "moller", "compton"])
    x.add_argument("--s", type=float, nargs="+", dest="s_values", metavar="S", help="moller: cm s in mass^2")
    x.add_argument("--energy", type=float, nargs="+", help="coulomb: total energy E")
    x.add_argument("--omega-i", type=float, nargs="+", dest="omega_i", help="compton: photon energy")
    x.add_argument("--mass", type=float)
    x.add_argument("--Z", type=float)
    coupling = x.add_mutually_exclusive_group()
    coupling.add_argument("--alpha", type=float, help="fine-structure constant")
    coupling.add_argument("--e", type=float, dest="charge", help="coupling e; alpha = e^2/(4 pi)")
    x.add_argument("--theta", type=float, help="single angle in degrees")
    x.add_argument("--theta-min", type=float, dest="theta_min_deg")
    x.add_argument("--theta-max", type=float, dest="theta_max_deg")
    x.add_argument("--steps", type=int)
    x.add_argument("--min-angle", type=float, dest="min_angle_deg", help="pole exclusion angle in degrees")
    x.add_argument("--unpolarized", action="store_true", default=None)
    x.add_argument("--pol-i", type=int, help="1: in-plane, 2: normal")
    x.add_argument("--pol-f", type=int, help="1: in-plane, 2: normal")
    x.add_argument("--out", help="output path or - for stdout")
    x.add_argument("--format", choices=["csv", "json"])
    x.add_argument("--barn", action="store_true", default=None, help="convert to mb with masses in GeV")
    x.add_argument("--rtol", type=float, dest="pipeline_rtol", help="pipeline agreement tolerance")
    x.add_argument("--workers", type=int)

    so = sub.add_parser("singular-order", help="singular order and split of a descriptor")
    so.add_argument("descriptor", help='e.g. "delta m=1 deg=2 sgn"')
    return parser


def make_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        for key, value in read_config_file(args.config).items():
            setattr(cfg, key, value)
    cfg.subcommand = args.subcommand or ""
    if args.subcommand == "xsec":
        cfg.process = args.process
        for name in ("mass", "Z", "alpha", "theta_min_deg", "theta_max_deg", "steps", "min_angle_deg",
                     "unpolarized", "pol_i", "pol_f", "out", "format", "barn", "pipeline_rtol", "workers"):
            value = getattr(args, name)
            if value is not None:
                setattr(cfg, name, value)
        if args.charge is not None:
            if args.charge <= 0:
                raise UsageError(f"--e must be positive, got {args.charge}")
            cfg.alpha = alpha_from_coupling(args.charge)
        if args.theta is not None:
            cfg.theta_min_deg = cfg.theta_max_deg = args.theta
            cfg.steps = 1
        energies = {"coulomb": args.energy, "moller": args.s_values, "compton": args.omega_i}[args.process]
        if energies:
            cfg.energies = list(energies)
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
        if args.show_config:
            for key, value in asdict(cfg).items():
                print(f"{key} = {value}")
            print(f"# tolerances: {DEFAULT_TOLERANCES}")
            return EXIT_OK
        if not args.subcommand:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        handler = {"verify": cmd_verify, "xsec": cmd_xsec, "singular-order": cmd_singular_order}[args.subcommand]
        return handler(args, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
