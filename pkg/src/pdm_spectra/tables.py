"""Reference heterostructures T1-T8 with their published spectra.

Each table lists model cases (a profile family on its inner interval) and
rows of printed energies obtained by one method for one ordering.  Search
windows default to the printed span of a row padded by 20 % on both sides
(20 % of |E| for a single level), clipped at the lowest outer band edge.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .analytic import solve_transcendental
from .closedform import isotonic_levels, poschl_teller_count, poschl_teller_levels, singular_levels
from .errors import InvalidParameterError, NoBoundStateError
from .multistep import find_poles
from .orderings import ExponentialDH, g_parameter, parse_ordering
from .profiles import (
    DEFAULT_N,
    Exponential,
    GaussianMass,
    GaussianMassDelta,
    GaussianPotential,
    GaussianPotentialDelta,
    HyperbolicMass,
    MorseLike,
    ParabolicDouble,
    SingularParabolicMass,
    SymmetricRational,
    build_model,
    discretize,
)
from .units import energy_from_dimensionless, energy_to_dimensionless, to_dimensionless

__all__ = [
    "Case",
    "Row",
    "Table",
    "TABLES",
    "get_table",
    "row_window",
    "compute_row",
    "CellResult",
    "RowResult",
    "TableReport",
    "reproduce_table",
    "closed_form_spectrum",
]

PAD = 0.2
METHODS = ("poles", "transcendental", "closedform")


@dataclass(frozen=True)
class Case:
    """A model of a table: profile family, junctions and reporting unit."""

    key: str
    label: str
    family: object
    z0: float | None = None
    z1: float | None = None
    length_nm: float | None = None

    def model(self):
        return build_model(self.family, self.z0, self.z1)

    @property
    def unit(self) -> str:
        return "meV" if self.length_nm is not None else "dimensionless"

    def to_report(self, E):
        """Dimensionless energies to the reporting unit."""
        if self.length_nm is None:
            return np.asarray(E, dtype=float)
        return energy_from_dimensionless(E, self.length_nm) * 1e3

    def from_report(self, E):
        if self.length_nm is None:
            return np.asarray(E, dtype=float)
        return energy_to_dimensionless(np.asarray(E, dtype=float) * 1e-3, self.length_nm)


@dataclass(frozen=True)
class Row:
    case: str
    ordering: str
    method: str
    values: tuple
    tol: float


@dataclass(frozen=True)
class Table:
    id: str
    title: str
    columns: int
    cases: tuple
    rows: tuple
    notes: str = ""

    def case(self, key: str) -> Case:
        for c in self.cases:
            if c.key == key:
                return c
        raise InvalidParameterError(f"table {self.id} has no case {key!r}")

    @property
    def default_case(self) -> Case:
        return self.cases[0]


def _rows(case, ordering, method, values, tol):
    return Row(case, ordering, method, tuple(values), tol)


_SYM = dict(mu=3.0, sigma=4.0)
_Z_SYM = dict(z0=-2.0, z1=2.0)
_Z_MORSE = dict(z0=-0.8, z1=0.8)
_MORSE = dict(V0M=10.0, m0M=2.0, sigma=2.0)


def _t1():
    cases = (Case("ms", "m_s(z), V_s(z)", SymmetricRational(**_SYM), **_Z_SYM),)
    bdd = (-8.25, -6.875, -5.625, -4.50009, -3.5013, -2.63724, -1.96428)
    zk = (-8.3099, -6.9297, -5.6745, -4.54428, -3.53899, -2.66042, -1.94466)
    rows = (
        _rows("ms", "bdd", "transcendental", bdd, 1e-3),
        _rows("ms", "bdd", "poles", bdd, 1e-3),
        _rows("ms", "bdd", "closedform", (-8.25, -6.875, -5.625, -4.5, -3.5, -2.625, -1.875), 1e-5),
        _rows("ms", "zk", "transcendental", zk, 1e-3),
        _rows("ms", "zk", "poles", zk, 1e-3),
        _rows("ms", "zk", "closedform", (-8.3099, -6.9297, -5.6745, -4.54430, -3.539103, -2.65890, -1.90370), 1e-5),
        _rows("ms", "tl", "poles", (-8.29051, -6.9132, -5.66088, -4.53358, -3.53155, -2.65848, -1.95561), 1e-3),
        _rows("ms", "tl", "closedform", (-8.29167, -6.91667, -5.66667, -4.54167, -3.54167, -2.66667, -1.91667), 1e-5),
    )
    return Table("T1", "Symmetric rational profiles", 7, cases, rows)


def _t2():
    cases = (
        Case("mG", "m_G(z)", GaussianMass(**_SYM), **_Z_SYM),
        Case("ms", "m_s(z)", SymmetricRational(**_SYM), **_Z_SYM),
        Case("mG7", "m_G(7, z)", GaussianMassDelta(**_SYM, delta=7.0), **_Z_SYM),
        Case("mG70", "m_G(70, z)", GaussianMassDelta(**_SYM, delta=70.0), **_Z_SYM),
    )
    data = {
        "bdd": {
            "mG": (-8.27528, -6.92737, -5.727, -4.66314, -3.72403, -2.9007, -2.20866),
            "ms": (-8.25, -6.875, -5.625, -4.50009, -3.5013, -2.63724, -1.96428),
            "mG7": (-8.01692, -6.47117, -5.00746, -3.52209, -2.28029),
            "mG70": (-7.57495, -6.13984, -3.45826, -2.56635),
        },
        "zk": {
            "mG": (-8.30142, -6.95596, -5.75918, -4.70081, -3.76994, -2.95444, -2.24512),
            "ms": (-8.3099, -6.9297, -5.6745, -4.54428, -3.53899, -2.66042, -1.94466),
            "mG7": (-8.37197, -6.63962, -4.83016, -3.36362, -2.32209),
            "mG70": (-8.26032, -5.19903, -4.0049, -2.2545),
        },
        "tl": {
            "mG": (-8.29282, -6.94682, -5.74927, -4.68975, -3.7573, -2.94111, -2.23907),
            "ms": (-8.29051, -6.9132, -5.66088, -4.53358, -3.53155, -2.65848, -1.95561),
            "mG7": (-8.27014, -6.6162, -4.9169, -3.43401, -2.31913),
            "mG70": (-8.04052, -5.53761, -3.87688, -2.40156),
        },
    }
    rows = tuple(_rows(c, o, "poles", v, 2e-3) for o, block in data.items() for c, v in block.items())
    return Table("T2", "Rational potential with Gaussian masses", 7, cases, rows)


def _t3():
    cases = (
        Case("VG", "V_G(z)", GaussianPotential(**_SYM), **_Z_SYM),
        Case("VG1", "V_G(1, z)", GaussianPotentialDelta(**_SYM, delta=1.0), **_Z_SYM),
        Case("Vs", "V_s(z)", SymmetricRational(**_SYM), **_Z_SYM),
        Case("VG7", "V_G(7, z)", GaussianPotentialDelta(**_SYM, delta=7.0), **_Z_SYM),
    )
    data = {
        "bdd": {
            "VG": (-8.48885, -7.52102, -6.5416, -5.55965, -4.58509, -3.63137, -2.72542, -1.95856),
            "VG1": (-8.30802, -7.00905, -5.76342, -4.59031, -3.51713, -2.59422, -1.97481),
            "Vs": (-8.25, -6.875, -5.625, -4.50009, -3.5013, -2.63724, -1.96428),
            "VG7": (-7.34722, -4.45967, -2.41175),
        },
        "zk": {
            "VG": (-8.54777, -7.57359, -6.58914, -5.60293, -4.62408, -3.66359, -2.74035, -1.93135),
            "VG1": (-8.36777, -7.06359, -5.81314, -4.63529, -3.55622, -2.61807, -1.95067),
            "Vs": (-8.3099, -6.9297, -5.6745, -4.54428, -3.53899, -2.66042, -1.94466),
            "VG7": (-7.40843, -4.51762, -2.46253),
        },
        "tl": {
            "VG": (-8.52892, -7.55827, -6.57661, -5.59274, -4.61611, -3.65847, -2.74106, -1.94436),
            "VG1": (-8.34846, -7.04718, -5.7994, -4.62416, -3.5481, -2.61575, -1.9613),
            "Vs": (-8.29051, -6.9132, -5.66088, -4.53358, -3.53155, -2.65848, -1.95561),
            "VG7": (-7.38831, -4.4993, -2.4482),
        },
    }
    rows = tuple(_rows(c, o, "poles", v, 2e-3) for o, block in data.items() for c, v in block.items())
    return Table("T3", "Rational mass with Gaussian potentials", 8, cases, rows)


def _t4():
    cases = (Case("mM", "m_M(z), V_M(z)", MorseLike(**_MORSE), **_Z_MORSE),)
    bdd = (-7.74229, -5.40587, -3.99419)
    zk = (-8.08993, -5.60758, -4.12556)
    rows = (
        _rows("mM", "bdd", "transcendental", bdd, 1e-3),
        _rows("mM", "bdd", "poles", bdd, 1e-3),
        _rows("mM", "zk", "transcendental", zk, 1e-3),
        _rows("mM", "zk", "poles", zk, 1e-3),
        _rows("mM", "tl", "poles", (-8.04977, -5.5844, -4.10875), 1e-3),
    )
    return Table("T4", "Morse-like potential and exponential mass", 3, cases, rows)


def _t5():
    cases = (
        Case("mH0.5", "m_H(0.5, z)", HyperbolicMass(0.5, 2.0, 2.0, 10.0), **_Z_MORSE),
        Case("mM", "m_M(z)", MorseLike(**_MORSE), **_Z_MORSE),
        Case("mH2.75", "m_H(2.75, z)", HyperbolicMass(2.75, 2.0, 2.0, 10.0), **_Z_MORSE),
        Case("mH7", "m_H(7, z)", HyperbolicMass(7.0, 2.0, 2.0, 10.0), **_Z_MORSE),
    )
    data = {
        "bdd": {
            "mH0.5": (-8.07565, -6.96429, -5.9702, -5.08382, -4.29792, -3.65763),
            "mM": (-7.74229, -5.40587, -3.99419),
            "mH2.75": (-7.15447, -4.99484, -3.7632),
            "mH7": (-3.69866,),
        },
        "zk": {
            "mH0.5": (-8.09038, -6.97779, -5.98252, -5.09502, -4.30839, -3.66699),
            "mM": (-8.08993, -5.60758, -4.12556),
            "mH2.75": (-7.76532, -5.29044, -3.93178),
            "mH7": (-4.21368,),
        },
        "tl": {
            "mH0.5": (-8.08676, -6.977447, -5.97948, -5.09226, -4.30576, -3.66431),
            "mM": (-8.04977, -5.5844, -4.10875),
            "mH2.75": (-7.70847, -5.2647, -3.9123),
            "mH7": (-4.4308,),
        },
    }
    rows = tuple(_rows(c, o, "poles", v, 2e-3) for o, block in data.items() for c, v in block.items())
    return Table("T5", "Morse-like potential with hyperbolic masses", 6, cases, rows)


T6_PHYSICAL = {
    "lengths": {"a": 9.4, "b": 11.0, "c": 25.0, "d": 31.0},
    "energies": {"V0": 0.3},
    "masses": {"m0": 0.0960, "m1": 0.0655},
}


def parabolic_case(length_nm: float = 1.0) -> Case:
    d = to_dimensionless(T6_PHYSICAL, length_nm)
    fam = ParabolicDouble(**d["lengths"], **d["energies"], **d["masses"])
    return Case("p", "asymmetric parabolic pair", fam, length_nm=length_nm)


def _t6():
    rows = (
        _rows("p", "bdd", "poles", (50.5284, 117.34107, 156.51738), 0.2),
        _rows("p", "zk", "poles", (54.1197, 130.65338, 160.38424), 0.2),
        _rows("p", "tl", "poles", (52.8956, 126.1985, 158.91771), 0.2),
    )
    return Table("T6", "Asymmetric parabolic well pair (meV)", 3, (parabolic_case(1.0),), rows)


def _t7():
    cases = (Case("exp", "exponential profiles", Exponential(3.0, 0.5, 1.0, lam=1.0), z0=-2.0, z1=2.0),)
    rows = (
        _rows("exp", "bdd", "transcendental", (5.13516, 10.1865, 15.1575, 19.9185), 2e-3),
        _rows("exp", "bdd", "poles", (5.13456, 10.1856, 15.1565, 19.9177), 2e-3),
        _rows("exp", "zk", "transcendental", (4.63268, 10.0389, 15.223, 20.076), 2e-3),
        _rows("exp", "zk", "poles", (4.6323, 10.0384, 15.2222, 20.0753), 2e-3),
        _rows("exp", "tl", "poles", (4.63027, 9.9751, 15.119, 19.965), 2e-3),
    )
    return Table("T7", "Exponential potential and mass", 4, cases, rows)


def _t8():
    cases = (Case("sing", "singular profiles", SingularParabolicMass(2.0, -10.0, 1.0), z0=0.1, z1=4.0),)
    rows = (
        _rows("sing", "bdd", "transcendental", (-10.68215, -3.90650, -2.00662), 1e-3),
        _rows("sing", "bdd", "poles", (-10.6822, -3.90651, -2.00662), 1e-3),
        _rows("sing", "bdd", "closedform", (-10.6688, -3.9033, -2.00539), 1e-4),
        _rows("sing", "zk", "transcendental", (-16.05884, -4.94871, -2.370368), 1e-3),
        _rows("sing", "zk", "poles", (-16.05698, -4.94871, -2.37037), 1e-3),
        _rows("sing", "zk", "closedform", (-16.0, -4.93827, -2.36686), 1e-4),
        _rows("sing", "tl", "poles", (-14.38634, -4.65256, -2.27083), 1e-3),
    )
    return Table("T8", "Singular potential and parabolic mass", 3, cases, rows)


TABLES = {t.id: t for t in (_t1(), _t2(), _t3(), _t4(), _t5(), _t6(), _t7(), _t8())}


def get_table(table_id: str) -> Table:
    key = str(table_id).upper()
    if key not in TABLES:
        raise InvalidParameterError(f"unknown table {table_id!r}; expected one of {', '.join(TABLES)}")
    return TABLES[key]


def row_window(case: Case, model, values) -> tuple[float, float]:
    """Printed span padded by 20 % (20 % of |E| for one level), clipped at min(V0, V2)."""
    v = case.from_report(np.asarray(values, dtype=float))
    lo, hi = float(v.min()), float(v.max())
    pad = PAD * (hi - lo) if hi > lo else PAD * abs(lo)
    return lo - pad, min(hi + pad, model.threshold)


def closed_form_spectrum(model, ordering, E_min: float, E_max: float) -> np.ndarray:
    """Closed-form (whole-space) levels of the model's family inside [E_min, E_max]."""
    fam = model.family
    ordering = parse_ordering(ordering)
    out = []
    if type(fam) is SymmetricRational:
        for n in range(poschl_teller_count(fam.mu, fam.sigma, ordering)):
            out.append(poschl_teller_levels(fam.mu, fam.sigma, ordering, n))
    elif type(fam) is SingularParabolicMass:
        for n in range(10_000):
            e = singular_levels(fam.A, fam.B, fam.c, ordering, n)
            if e > E_max:
                break
            out.append(e)
    elif type(fam) is Exponential:
        omega = fam.c * math.sqrt(fam.Vc / fam.mu0)
        g = g_parameter(ordering, ExponentialDH())
        for n in range(10_000):
            e = isotonic_levels(omega, g, n)
            if e > E_max:
                break
            out.append(e)
    else:
        raise NoBoundStateError(f"no closed-form spectrum for the {type(fam).__name__} profile")
    E = np.array(sorted(out))
    return E[(E >= E_min) & (E <= E_max)]


def compute_row(table: Table, row: Row, n: int = DEFAULT_N, tol: float = 1e-8, window=None):
    """Energies of ``row`` (in the reporting unit) computed by its method."""
    case = table.case(row.case)
    model = case.model()
    lo, hi = window if window is not None else row_window(case, model, row.values)
    if row.method == "poles":
        E = find_poles(discretize(model, n), row.ordering, lo, hi, tol).energies
    elif row.method == "transcendental":
        E = solve_transcendental(model, row.ordering, lo, hi, tol).energies
    elif row.method == "closedform":
        E = closed_form_spectrum(model, row.ordering, -np.inf, np.inf)[: len(row.values)]
    else:
        raise InvalidParameterError(f"unknown method {row.method!r}")
    return case.to_report(E)


@dataclass(frozen=True)
class CellResult:
    index: int
    printed: float | None
    computed: float | None

    @property
    def diff(self) -> float | None:
        if self.printed is None or self.computed is None:
            return None
        return abs(self.computed - self.printed)


@dataclass(frozen=True)
class RowResult:
    row: Row
    label: str
    cells: tuple
    unit: str
    empty_cells: int

    @property
    def max_diff(self) -> float:
        d = [c.diff for c in self.cells if c.diff is not None]
        return max(d) if d else math.inf

    @property
    def missing(self) -> int:
        return sum(1 for c in self.cells if c.printed is not None and c.computed is None)

    @property
    def extra(self) -> tuple:
        return tuple(c.computed for c in self.cells if c.printed is None)

    @property
    def passed(self) -> bool:
        ok = self.missing == 0 and all(c.diff <= self.row.tol for c in self.cells if c.diff is not None)
        if self.empty_cells:
            # the table leaves columns empty: no further level may exist in the window
            ok = ok and not self.extra
        return ok


@dataclass(frozen=True)
class TableReport:
    table: Table
    rows: tuple
    n: int

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def _records(self):
        for r in self.rows:
            for c in r.cells:
                yield {
                    "case": r.row.case,
                    "label": r.label,
                    "ordering": r.row.ordering,
                    "method": r.row.method,
                    "level": c.index,
                    "printed": c.printed,
                    "computed": c.computed,
                    "diff": c.diff,
                    "tol": r.row.tol,
                    "unit": r.unit,
                }

    @staticmethod
    def _fmt(x):
        return "" if x is None else f"{x:.9g}"

    def to_csv(self) -> str:
        buf = io.StringIO()
        keys = ["case", "label", "ordering", "method", "level", "printed", "computed", "diff", "tol", "unit"]
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for rec in self._records():
            w.writerow({k: self._fmt(v) if isinstance(v, float) or v is None else v for k, v in rec.items()})
        return buf.getvalue()

    def to_json(self) -> str:
        recs = [{k: (float(f"{v:.9g}") if isinstance(v, float) and math.isfinite(v) else v) for k, v in rec.items()}
                for rec in self._records()]
        doc = {"table": self.table.id, "n": self.n, "passed": self.passed, "cells": recs}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def to_markdown(self) -> str:
        t = self.table
        lines = [f"## {t.id}: {t.title}", "", f"n = {self.n}", ""]
        lines.append("| case | ordering | method | level | printed | computed | abs diff | tol | ok |")
        lines.append("|---|---|---|---|---|---|---|---|---|")
        for r in self.rows:
            for c in r.cells:
                ok = "" if c.diff is None else ("yes" if c.diff <= r.row.tol else "no")
                if c.printed is None:
                    ok = "extra" if r.empty_cells else "beyond table"
                elif c.computed is None:
                    ok = "missing"
                lines.append(
                    f"| {r.label} | {r.row.ordering} | {r.row.method} | E{c.index} | "
                    f"{self._fmt(c.printed)} | {self._fmt(c.computed)} | {self._fmt(c.diff)} | {r.row.tol:g} | {ok} |"
                )
        lines.append("")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


def evaluate_row(table: Table, row: Row, n: int = DEFAULT_N, tol: float = 1e-8) -> RowResult:
    case = table.case(row.case)
    computed = list(compute_row(table, row, n, tol))
    printed = list(row.values)
    cells = []
    for i in range(max(len(printed), len(computed))):
        cells.append(
            CellResult(
                i,
                float(printed[i]) if i < len(printed) else None,
                float(computed[i]) if i < len(computed) else None,
            )
        )
    return RowResult(row, case.label, tuple(cells), case.unit, table.columns - len(printed))


def reproduce_table(table_id: str, n: int = DEFAULT_N, tol: float = 1e-8, rows=None) -> TableReport:
    """Recompute every row of a table next to its printed values."""
    table = get_table(table_id)
    selected = table.rows if rows is None else tuple(rows)
    return TableReport(table, tuple(evaluate_row(table, r, n, tol) for r in selected), n)
