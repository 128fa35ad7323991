"""Command-line front end.

Subcommands: spectrum, scan, wavefunction, compare and reproduce-table.  A
model comes either from a table preset (``--table T1`` ... ``T8``) or from a
TOML config file with sections [model], [ordering], [method] and [output]::

    [model]
    family = "symmetric"        # see FAMILIES
    mu = 3.0
    sigma = 4.0
    z0 = -2.0
    z1 = 2.0

    [model.units]               # optional: parameters in nm, eV and m_e
    length_nm = 1.0

    [ordering]
    name = "bdd"                # bdd, zk, lk, gw, tl, vr:<alpha> or vr:<alpha>,<gamma>

    [method]
    name = "poles"              # poles, transcendental, closedform or compare
    n = 2000
    tol = 1e-8
    emin = -9.0
    emax = -1.0

    [output]
    path = "spectrum.json"
    format = "json"             # json, csv or md
    scan = "scan.csv"           # optional |R|^2 scan of the window
    wavefunction = "psi.csv"    # optional wavefunction of level 0

Command-line flags override config values.  Energies on the command line and
in the output are in meV when a physical-unit block is present (and for T6),
dimensionless otherwise.  Failures print one JSON line on stderr and exit 1.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import profiles
from .analytic import solve_transcendental, wavefunction
from .errors import (
    ConfigError,
    InvalidParameterError,
    SpectraError,
    UnsupportedAnalyticError,
    UnsupportedMatchingError,
)
from .multistep import find_poles, scan
from .orderings import OrderingKind, can_match, parse_ordering
from .profiles import DEFAULT_N, discretize
from .tables import Case, closed_form_spectrum, get_table, reproduce_table, row_window
from .units import to_dimensionless

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

__all__ = ["FAMILIES", "RunConfig", "load_config", "main", "build_parser"]

FAMILIES = {
    "symmetric": profiles.SymmetricRational,
    "gaussian-mass": profiles.GaussianMass,
    "gaussian-mass-delta": profiles.GaussianMassDelta,
    "gaussian-potential": profiles.GaussianPotential,
    "gaussian-potential-delta": profiles.GaussianPotentialDelta,
    "morse": profiles.MorseLike,
    "hyperbolic": profiles.HyperbolicMass,
    "parabolic": profiles.ParabolicDouble,
    "exponential": profiles.Exponential,
    "singular": profiles.SingularParabolicMass,
    "steps": profiles.ExplicitSteps,
}

# parameters converted by the physical-unit block
_LENGTHS = {"z0", "z1", "a", "b", "c", "d", "interfaces"}
_ENERGIES = {"V0", "potentials"}
_MASSES = {"m0", "m1", "masses"}
_UNIT_FAMILIES = {"parabolic", "steps"}

METHODS = ("poles", "transcendental", "closedform", "compare")
FORMATS = ("json", "csv", "md")
_CLOSED_FORM = (profiles.SymmetricRational, profiles.SingularParabolicMass, profiles.Exponential)


@dataclass
class RunConfig:
    """Resolved run settings: model case, ordering, method, window and outputs."""

    case: Case
    ordering: str = "bdd"
    method: str = "poles"
    n: int = DEFAULT_N
    tol: float = 1e-8
    emin: float | None = None
    emax: float | None = None
    table: str | None = None
    out: str | None = None
    format: str = "json"
    scan_path: str | None = None
    wavefunction_path: str | None = None


def _g(x):
    """9 significant digits, as a JSON-safe float (None for non-finite)."""
    if x is None or not math.isfinite(x):
        return None
    return float(f"{x:.9g}")


def _section(doc, name):
    sec = doc.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"[{name}] must be a table")
    return sec


def _scale(value, factor):
    if isinstance(value, (list, tuple)):
        return [float(v) * factor for v in value]
    return float(value) * factor


def _case_from_model(sec: dict) -> Case:
    sec = dict(sec)
    name = sec.pop("family", None)
    if name not in FAMILIES:
        raise ConfigError(f"[model] family must be one of {', '.join(FAMILIES)}, got {name!r}")
    cls = FAMILIES[name]
    units = sec.pop("units", None)
    length_nm = None
    if units is not None:
        if name not in _UNIT_FAMILIES:
            raise ConfigError(f"physical units are only supported for {', '.join(sorted(_UNIT_FAMILIES))}")
        if set(units) != {"length_nm"}:
            raise ConfigError("[model.units] takes exactly one key, length_nm")
        length_nm = float(units["length_nm"])
        scale = to_dimensionless({"lengths": {"x": 1.0}, "energies": {"x": 1.0}}, length_nm)
        for key in list(sec):
            if key in _LENGTHS:
                sec[key] = _scale(sec[key], scale["lengths"]["x"])
            elif key in _ENERGIES:
                sec[key] = _scale(sec[key], scale["energies"]["x"])
            elif key not in _MASSES:
                raise ConfigError(f"no unit known for parameter {key!r}")
    z0, z1 = sec.pop("z0", None), sec.pop("z1", None)
    allowed = {f.name for f in dataclasses.fields(cls)}
    unknown = set(sec) - allowed
    if unknown:
        raise ConfigError(f"unknown [model] keys for {name}: {', '.join(sorted(unknown))}")
    try:
        fam = cls(**sec)
    except TypeError as exc:
        raise ConfigError(f"[model] {name}: {exc}") from None
    return Case("config", name, fam, z0=z0, z1=z1, length_nm=length_nm)


def load_config(path: str) -> RunConfig:
    """Parse a TOML config file into a :class:`RunConfig`."""
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse config {path!r}: {exc}") from None
    unknown = set(doc) - {"model", "ordering", "method", "output"}
    if unknown:
        raise ConfigError(f"unknown config sections: {', '.join(sorted(unknown))}")
    case = _case_from_model(_section(doc, "model"))
    ordering = _section(doc, "ordering")
    method = _section(doc, "method")
    output = _section(doc, "output")
    cfg = RunConfig(case=case)
    cfg.ordering = str(ordering.get("name", cfg.ordering))
    cfg.method = str(method.get("name", cfg.method))
    cfg.n = int(method.get("n", cfg.n))
    cfg.tol = float(method.get("tol", cfg.tol))
    cfg.emin = method.get("emin")
    cfg.emax = method.get("emax")
    cfg.out = output.get("path")
    cfg.format = str(output.get("format", cfg.format))
    cfg.scan_path = output.get("scan")
    cfg.wavefunction_path = output.get("wavefunction")
    return cfg


def _resolve(args) -> RunConfig:
    if getattr(args, "config", None):
        if getattr(args, "table", None):
            raise ConfigError("give either --table or --config, not both")
        cfg = load_config(args.config)
    elif getattr(args, "table", None):
        table = get_table(args.table)
        case = table.case(args.case) if getattr(args, "case", None) else table.default_case
        cfg = RunConfig(case=case, table=table.id)
    else:
        raise ConfigError("a model is required: pass --table or --config")
    for key in ("ordering", "method", "n", "tol", "emin", "emax", "out", "format"):
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    if cfg.method not in METHODS:
        raise ConfigError(f"method must be one of {', '.join(METHODS)}, got {cfg.method!r}")
    if cfg.format not in FORMATS:
        raise ConfigError(f"format must be one of {', '.join(FORMATS)}, got {cfg.format!r}")
    if cfg.n < 1:
        raise ConfigError("n must be a positive integer")
    if not cfg.tol > 0:
        raise ConfigError("tol must be positive")
    return cfg


def validate_method(method: str, ordering, family=None) -> None:
    """Reject method/ordering/profile combinations before any computation."""
    ordering = parse_ordering(ordering)
    if method in ("poles", "compare") and not can_match(ordering):
        raise UnsupportedMatchingError(f"no junction conditions are available for the {ordering.label} ordering")
    if method in ("transcendental", "compare"):
        if ordering.canonical().kind not in (OrderingKind.BDD, OrderingKind.ZK):
            raise UnsupportedAnalyticError(f"analytic matching is only available for BD-D and Z-K, not {ordering.label}")
    if method == "closedform" and family is not None and type(family) not in _CLOSED_FORM:
        raise UnsupportedAnalyticError(f"no closed-form spectrum for the {type(family).__name__} profile")


def _window(cfg: RunConfig, model) -> tuple[float, float]:
    """Search window in dimensionless energy."""
    case = cfg.case
    lo = hi = None
    if cfg.table is not None:
        table = get_table(cfg.table)
        spans = [
            row_window(case, model, r.values)
            for r in table.rows
            if r.case == case.key and parse_ordering(r.ordering) == parse_ordering(cfg.ordering)
        ]
        if spans:
            lo, hi = min(s[0] for s in spans), max(s[1] for s in spans)
    if lo is None:
        # fallback: from the lowest sampled potential up to the outer band edge
        z = np.linspace(model.z0, model.z1, 2001)
        lo, hi = float(np.min(model.inner_potential(z))), model.threshold
    if cfg.emin is not None:
        lo = float(case.from_report(cfg.emin))
    if cfg.emax is not None:
        hi = float(case.from_report(cfg.emax))
    if not lo < hi:
        raise InvalidParameterError(f"empty search window [{lo:.9g}, {hi:.9g}]")
    return lo, hi


def _solve(cfg: RunConfig, model, method: str, lo: float, hi: float):
    if method == "poles":
        return find_poles(discretize(model, cfg.n), cfg.ordering, lo, hi, cfg.tol)
    if method == "transcendental":
        return solve_transcendental(model, cfg.ordering, lo, hi, cfg.tol)
    E = closed_form_spectrum(model, cfg.ordering, lo, hi)
    return _ClosedForm(E)


@dataclass(frozen=True)
class _ClosedForm:
    energies: np.ndarray
    diagnostics: tuple = ()

    @property
    def residuals(self):
        return np.zeros_like(self.energies)


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _spectrum_doc(cfg, model, method, result, window):
    case = cfg.case
    E = case.to_report(result.energies)
    return {
        "table": cfg.table,
        "case": case.key,
        "family": type(model.family).__name__,
        "ordering": parse_ordering(cfg.ordering).name,
        "method": method,
        "status": "ok" if len(E) else "empty",
        "unit": case.unit,
        "n": cfg.n if method == "poles" else None,
        "tol": cfg.tol,
        "window": [_g(x) for x in case.to_report(np.array(window))],
        "energies": [_g(e) for e in E],
        "residuals": [_g(r) for r in result.residuals],
        "diagnostics": list(result.diagnostics),
    }


def _format_spectrum(doc, fmt):
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        lines = ["level,E"] + [f"{i},{e:.9g}" for i, e in enumerate(doc["energies"])]
        return "\n".join(lines) + "\n"
    lines = [
        f"{doc['method']} spectrum, ordering {doc['ordering']} ({doc['unit']}), status {doc['status']}",
        "",
        "| level | E |",
        "|---|---|",
    ]
    lines += [f"| {i} | {e:.9g} |" for i, e in enumerate(doc["energies"])]
    return "\n".join(lines) + "\n"


def _write_extras(cfg, model, window, energies):
    if cfg.scan_path:
        res = scan(discretize(model, cfg.n), cfg.ordering, *window)
        _emit(res.to_csv(), cfg.scan_path)
    if cfg.wavefunction_path and len(energies):
        psi = wavefunction(model, cfg.ordering, float(energies[0]))
        _emit(psi.to_csv(_z_grid(model, None, None, 401)), cfg.wavefunction_path)


def cmd_spectrum(args) -> int:
    cfg = _resolve(args)
    if cfg.method == "compare":
        return _compare(cfg)
    model = cfg.case.model()
    validate_method(cfg.method, cfg.ordering, model.family)
    window = _window(cfg, model)
    result = _solve(cfg, model, cfg.method, *window)
    doc = _spectrum_doc(cfg, model, cfg.method, result, window)
    _emit(_format_spectrum(doc, cfg.format), cfg.out)
    _write_extras(cfg, model, window, result.energies)
    return 0


def cmd_scan(args) -> int:
    cfg = _resolve(args)
    model = cfg.case.model()
    validate_method("poles", cfg.ordering)
    window = _window(cfg, model)
    res = scan(discretize(model, cfg.n), cfg.ordering, *window, points=args.points)
    _emit(res.to_csv(), cfg.out)
    return 0


def _z_grid(model, zmin, zmax, points):
    width = model.z1 - model.z0
    lo = model.z0 - 0.5 * width if zmin is None else zmin
    hi = model.z1 + 0.5 * width if zmax is None else zmax
    if not (lo < hi and points >= 2):
        raise InvalidParameterError("need zmin < zmax and at least two points")
    return np.linspace(lo, hi, points)


def cmd_wavefunction(args) -> int:
    cfg = _resolve(args)
    model = cfg.case.model()
    validate_method("transcendental", cfg.ordering, model.family)
    if args.energy is not None:
        E = float(cfg.case.from_report(args.energy))
    else:
        window = _window(cfg, model)
        levels = solve_transcendental(model, cfg.ordering, *window, cfg.tol).energies
        if args.level >= len(levels):
            raise InvalidParameterError(f"level {args.level} not found; {len(levels)} levels in the window")
        E = float(levels[args.level])
    psi = wavefunction(model, cfg.ordering, E)
    _emit(psi.to_csv(_z_grid(model, args.zmin, args.zmax, args.points)), cfg.out)
    return 0


def _compare(cfg: RunConfig) -> int:
    model = cfg.case.model()
    validate_method("compare", cfg.ordering, model.family)
    window = _window(cfg, model)
    a = cfg.case.to_report(_solve(cfg, model, "transcendental", *window).energies)
    b = cfg.case.to_report(_solve(cfg, model, "poles", *window).energies)
    rows = []
    for i in range(max(len(a), len(b))):
        ea = float(a[i]) if i < len(a) else None
        eb = float(b[i]) if i < len(b) else None
        d = abs(ea - eb) if ea is not None and eb is not None else None
        rows.append((i, ea, eb, d))
    diffs = [r[3] for r in rows if r[3] is not None]
    max_diff = max(diffs) if diffs and len(a) == len(b) else None
    doc = {
        "table": cfg.table,
        "ordering": parse_ordering(cfg.ordering).name,
        "unit": cfg.case.unit,
        "n": cfg.n,
        "status": "ok" if rows else "empty",
        "transcendental": [_g(x) for x in a],
        "poles": [_g(x) for x in b],
        "max_discrepancy": _g(max_diff),
    }
    if cfg.format == "json":
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        f = lambda x: "" if x is None else f"{x:.9g}"  # noqa: E731
        if cfg.format == "csv":
            lines = ["level,transcendental,poles,abs_diff"]
            lines += [f"{i},{f(x)},{f(y)},{f(d)}" for i, x, y, d in rows]
        else:
            lines = ["| level | transcendental | poles | abs diff |", "|---|---|---|---|"]
            lines += [f"| {i} | {f(x)} | {f(y)} | {f(d)} |" for i, x, y, d in rows]
            lines += ["", f"max discrepancy: {f(max_diff) or 'level counts differ'}"]
        text = "\n".join(lines) + "\n"
    _emit(text, cfg.out)
    return 0


def cmd_compare(args) -> int:
    return _compare(_resolve(args))


def cmd_reproduce(args) -> int:
    table = get_table(args.table)
    fmt = args.format or "md"
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {', '.join(FORMATS)}")
    rows = table.rows
    if args.ordering is not None:
        rows = tuple(r for r in rows if parse_ordering(r.ordering) == parse_ordering(args.ordering))
    if args.method is not None:
        rows = tuple(r for r in rows if r.method == args.method)
    report = reproduce_table(table.id, n=args.n or DEFAULT_N, tol=args.tol or 1e-8, rows=rows)
    text = {"md": report.to_markdown, "csv": report.to_csv, "json": report.to_json}[fmt]()
    _emit(text, args.out)
    return 1 if args.strict and not report.passed else 0


def _common(p, model=True):
    if model:
        p.add_argument("--table", help="table preset T1..T8")
        p.add_argument("--case", help="model case within the table (default: its first case)")
        p.add_argument("--config", help="TOML config file")
    p.add_argument("--ordering", help="bdd, zk, lk, gw, tl, vr:<alpha> or vr:<alpha>,<gamma>")
    p.add_argument("--n", type=int, help="number of slabs of the step discretization")
    p.add_argument("--tol", type=float, help="energy tolerance")
    if model:
        p.add_argument("--emin", type=float, help="lower end of the search window")
        p.add_argument("--emax", type=float, help="upper end of the search window")
    p.add_argument("--out", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pdm-spectra", description="Bound states of position-dependent-mass heterostructures.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="bound energies of a model")
    _common(p)
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--format", choices=FORMATS)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("scan", help="|R|^2 on an energy grid as CSV (E,Rc)")
    _common(p)
    p.add_argument("--points", type=int, default=4000)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("wavefunction", help="bound-state wavefunction as CSV (z,Re_psi,Im_psi)")
    _common(p)
    level = p.add_mutually_exclusive_group()
    level.add_argument("--energy", type=float, help="energy of the state (must be a root)")
    level.add_argument("--level", type=int, default=0, help="index of the level in the window")
    p.add_argument("--zmin", type=float)
    p.add_argument("--zmax", type=float)
    p.add_argument("--points", type=int, default=401)
    p.set_defaults(func=cmd_wavefunction)

    p = sub.add_parser("compare", help="transcendental and pole spectra side by side")
    _common(p)
    p.add_argument("--format", choices=FORMATS, default="md")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("reproduce-table", help="recompute a table next to its printed values")
    p.add_argument("--table", required=True, help="table preset T1..T8")
    _common(p, model=False)
    p.add_argument("--method", choices=METHODS[:3])
    p.add_argument("--format", choices=FORMATS, default="md")
    p.add_argument("--strict", action="store_true", help="exit 1 when a cell misses its tolerance")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpectraError as exc:
        err = {"error": exc.code, "message": str(exc)}
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
