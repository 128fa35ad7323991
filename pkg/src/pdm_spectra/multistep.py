"""Reflection amplitude of a step grid and bound states as its poles.

The amplitude is built right to left from the single-interface factors,

    R_j = (r_j + R_{j+1} p_{j+1}) / (1 + r_j R_{j+1} p_{j+1}),
    p_{j+1} = exp(2 i k_{j+1} w_{j+1}),

where w_{j+1} is the width of region j + 1.  Phases are referred to the first
interface, so R does not change when the whole grid is translated.  The
recursion is carried in projective form (numerator, denominator) and
rescaled at every level, so evanescent regions never overflow.

Bound states below both outer band edges are the zeros of the denominator.
Multiplied by a known phase the denominator becomes a real function of E, so
the poles are located by sign changes and bisection instead of by minimizing
1 / (1 + |R|^2); the latter misses narrow poles that sit next to a zero of R.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, UnsupportedMatchingError
from .orderings import OrderingSpec, boundary_coeffs, can_match, parse_ordering
from .profiles import StepGrid

__all__ = [
    "wavenumber",
    "reflection_amplitude",
    "pole_function",
    "ScanResult",
    "SpectrumResult",
    "scan",
    "find_poles",
    "DEFAULT_POINTS",
    "ACCEPT_F",
]

DEFAULT_POINTS = 4000
ACCEPT_F = 1e-4
MAX_BISECTIONS = 200
THRESHOLD_SHIFT = 1e-12
# energies x regions handled per vectorized block
_BLOCK = 2_000_000


def wavenumber(m, V, E):
    """k = sqrt(m (E - V)) on the branch Im k >= 0."""
    d = np.asarray(m, dtype=float) * (np.asarray(E, dtype=float) - np.asarray(V, dtype=float))
    k = np.where(d >= 0, np.sqrt(np.abs(d)) + 0j, 1j * np.sqrt(np.abs(d)))
    return complex(k) if k.ndim == 0 else k


def _check(grid, ordering):
    ordering = parse_ordering(ordering)
    if not can_match(ordering):
        raise UnsupportedMatchingError(
            f"no junction conditions are available for the {ordering.label} ordering"
        )
    if not isinstance(grid, StepGrid):
        raise InvalidParameterError("expected a StepGrid")
    return ordering


def _avoid_thresholds(grid, E):
    # k = 0 makes the phase factors degenerate; nudge E off every V_j
    hit = np.isin(E, grid.potentials)
    return np.where(hit, E + THRESHOLD_SHIFT, E)


def _recursion(grid, ordering, E):
    """Projective recursion for a 1-D block of energies.

    Returns (num, den, theta) with R = num / den, max(|num|, |den|) = 1 and
    theta the phase that makes den real below both outer band edges.
    """
    z, V, m = grid.interfaces, grid.potentials, grid.masses
    mu, rho = boundary_coeffs(ordering, m[:-1], m[1:])
    mu, rho = np.atleast_1d(mu), np.atleast_1d(rho)
    k = wavenumber(m[:, None], V[:, None], E[None, :])
    a = k[:-1] * mu[:, None]
    b = k[1:] * rho[:, None]
    r = (a - b) / (a + b)
    w = np.diff(z)
    ph = np.exp(2j * k[1:-1] * w[:, None])
    theta = (
        np.angle(a + b).sum(0)
        - np.angle(k[:-1]).sum(0)
        - (k[1:-1].real * w[:, None]).sum(0)
    )
    num = r[-1].copy()
    den = np.ones_like(num)
    for j in range(z.size - 2, -1, -1):
        x = num * ph[j]
        num, den = r[j] * den + x, den + r[j] * x
        s = np.maximum(np.abs(num), np.abs(den))
        s = np.where(s > 0, s, 1.0)
        num /= s
        den /= s
    return num, den, theta


def _blocked(grid, ordering, E, fn):
    E = np.atleast_1d(np.asarray(E, dtype=float))
    E = _avoid_thresholds(grid, E)
    step = max(1, _BLOCK // (grid.interfaces.size + 1))
    parts = [fn(_recursion(grid, ordering, E[i : i + step])) for i in range(0, E.size, step)]
    return np.concatenate(parts) if parts else np.empty(0)


def reflection_amplitude(grid: StepGrid, ordering, E):
    """Reflection amplitude R(E) of ``grid``; scalar or array ``E``.

    A vanishing recursion denominator (|den| < 1e-300) is reported as a
    complex infinity, which signals a pole at E.
    """
    ordering = _check(grid, ordering)
    scalar = np.ndim(E) == 0

    def ratio(t):
        num, den, _ = t
        pole = np.abs(den) < 1e-300
        safe = np.where(pole, 1.0, den)
        return np.where(pole, complex(np.inf, np.inf), num / safe)

    R = _blocked(grid, ordering, E, ratio)
    return complex(R[0]) if scalar else R


def _f_value(t):
    num, den, _ = t
    a2, d2 = np.abs(num) ** 2, np.abs(den) ** 2
    return d2 / (a2 + d2)


def pole_function(grid: StepGrid, ordering, E):
    """Phase-corrected, normalized recursion denominator.

    For E below both outer band edges the result is real up to rounding and
    changes sign at every bound state.  Returned as complex so the residual
    imaginary part can be inspected.
    """
    ordering = _check(grid, ordering)

    def real_den(t):
        num, den, theta = t
        nrm = np.sqrt(np.abs(num) ** 2 + np.abs(den) ** 2)
        return den * np.exp(1j * theta) / nrm

    return _blocked(grid, ordering, E, real_den)


def _threads():
    try:
        return max(1, int(os.environ.get("PDM_SPECTRA_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class ScanResult:
    """|R|^2 sampled on a uniform energy grid; poles show up as ``inf``."""

    energies: np.ndarray
    values: np.ndarray
    grid_n: int
    ordering: OrderingSpec

    def to_csv(self) -> str:
        lines = ["E,Rc"]
        lines += [f"{e:.9g},{v:.9g}" for e, v in zip(self.energies, self.values)]
        return "\n".join(lines) + "\n"

    def local_maxima(self, threshold: float = 0.0) -> np.ndarray:
        v = self.values
        i = np.nonzero((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:]) & (v[1:-1] > threshold))[0] + 1
        return self.energies[i]


def scan(grid: StepGrid, ordering, E_min: float, E_max: float, points: int = DEFAULT_POINTS):
    """Sample |R(E)|^2 at ``points`` uniformly spaced energies.

    Samples nearest to a bound-state pole are set to ``inf``.

    Blocks of energies may be evaluated on up to PDM_SPECTRA_THREADS threads;
    the result is assembled in energy order.
    """
    ordering = _check(grid, ordering)
    if not E_min < E_max:
        raise InvalidParameterError("need E_min < E_max")
    if points < 2:
        raise InvalidParameterError("need at least two scan points")
    E = np.linspace(E_min, E_max, int(points))
    nthreads = min(_threads(), E.size)
    chunks = np.array_split(E, nthreads)

    def work(block):
        R = reflection_amplitude(grid, ordering, block)
        return np.abs(R) ** 2

    if nthreads == 1:
        values = work(E)
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            values = np.concatenate(list(pool.map(work, chunks)))
    values = np.where(np.isnan(values), np.inf, values)
    # below both outer band edges the poles are located exactly and the
    # nearest sample of each is flagged as infinite
    below = E <= min(grid.potentials[0], grid.potentials[-1])
    if np.count_nonzero(below) >= 2:
        poles, _, _ = _locate(grid, ordering, E[below], 1e-12)
        for p in poles:
            values[np.argmin(np.abs(E - p))] = np.inf
    return ScanResult(E, values, grid.n, ordering)


@dataclass(frozen=True)
class SpectrumResult:
    """Bound energies found by one method.

    ``method`` is one of "MultiStepPoles", "Transcendental" or "ClosedForm";
    ``residuals`` holds the per-energy refinement residual and ``metadata``
    the discretization and tolerances used.
    """

    energies: np.ndarray
    method: str
    ordering: OrderingSpec
    residuals: np.ndarray
    metadata: dict = field(default_factory=dict)
    diagnostics: tuple = ()

    def __len__(self):
        return len(self.energies)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "ordering": self.ordering.name,
            "energies": [float(f"{e:.9g}") for e in self.energies],
            "residuals": [float(f"{r:.9g}") for r in self.residuals],
            "n": self.metadata.get("n"),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _bisect(fun, lo, hi, glo, tol):
    """Vectorized bisection of sign changes of ``fun`` on the brackets [lo, hi].

    Brackets are halved until they reach floating-point resolution, which is
    never coarser than ``tol``; narrow poles need the extra digits for the
    residual test.
    """
    converged = False
    for _ in range(MAX_BISECTIONS):
        if lo.size == 0:
            return lo, True
        mid = 0.5 * (lo + hi)
        width = hi - lo
        if np.all((mid <= lo) | (mid >= hi) | (width <= 4 * np.finfo(float).eps * np.abs(mid))):
            converged = True
            break
        gm = fun(mid)
        left = np.sign(gm) == np.sign(glo)
        lo = np.where(left, mid, lo)
        glo = np.where(left, gm, glo)
        hi = np.where(left, hi, mid)
    converged = converged or bool(np.max(hi - lo) <= tol)
    return 0.5 * (lo + hi), converged


def _locate(grid, ordering, E, tol):
    """Accepted poles, their residuals f(E*) and diagnostics for the sampled grid ``E``."""
    g = pole_function(grid, ordering, E).real
    i = np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)[0]
    exact = np.nonzero(g == 0)[0]

    def fun(x):
        return pole_function(grid, ordering, x).real

    roots, ok = _bisect(fun, E[i].copy(), E[i + 1].copy(), g[i].copy(), tol)
    roots = np.sort(np.concatenate([roots, E[exact]]))
    diagnostics = []
    if not ok:
        diagnostics.append(f"bisection did not reach tol={tol:g} in {MAX_BISECTIONS} steps")
    f = _blocked(grid, ordering, roots, _f_value) if roots.size else np.empty(0)
    keep = f < ACCEPT_F
    narrow = ~keep & _unresolved_pole(grid, fun, roots)
    for e, fe in zip(roots[narrow], f[narrow]):
        diagnostics.append(f"pole at E={e:.9g} is narrower than floating-point resolution, accepted with f={fe:.3g}")
    for e, fe in zip(roots[~(keep | narrow)], f[~(keep | narrow)]):
        diagnostics.append(f"sign change at E={e:.9g} rejected, f={fe:.3g}")
    keep |= narrow
    return roots[keep], f[keep], diagnostics


def _unresolved_pole(grid, fun, roots):
    """Sign changes that persist between neighbouring floats away from every V_j.

    A deep level far from the outer media gives a pole narrower than the float
    spacing, so f never drops below ACCEPT_F at any representable E.  The
    only other source of a jump in the real denominator is a band edge
    (k = 0), which is excluded explicitly.
    """
    if roots.size == 0:
        return np.zeros(0, dtype=bool)
    step = 4 * np.spacing(np.abs(roots))
    lo, hi = fun(roots - step), fun(roots + step)
    V = np.unique(grid.potentials)
    gap = np.min(np.abs(roots[:, None] - V[None, :]), axis=1)
    return (np.sign(lo) * np.sign(hi) < 0) & (gap > 1e-9 * np.maximum(1.0, np.abs(roots)))


def find_poles(
    grid: StepGrid,
    ordering,
    E_min: float,
    E_max: float,
    tol: float = 1e-8,
    points: int = DEFAULT_POINTS,
) -> SpectrumResult:
    """Bound states of ``grid`` in [E_min, E_max] as poles of R.

    The phase-corrected denominator is sampled on ``points`` energies, every
    sign change is bisected to a bracket narrower than ``tol``, and a root is
    accepted when f = 1 / (1 + |R|^2) is below 1e-4 there, or when the pole
    is too narrow to resolve in floating point (see ``_unresolved_pole``).  Rejected or
    unconverged brackets are listed in ``diagnostics``.
    """
    ordering = _check(grid, ordering)
    thr = min(grid.potentials[0], grid.potentials[-1])
    if not E_min < E_max:
        raise InvalidParameterError("need E_min < E_max")
    if E_max > thr:
        raise InvalidParameterError(
            f"bound-state search needs E_max <= min(V0, V2) = {thr:.9g}, got {E_max:.9g}"
        )
    if not tol > 0:
        raise InvalidParameterError("tol must be positive")
    E = np.linspace(E_min, E_max, int(points))
    roots, f, diagnostics = _locate(grid, ordering, E, tol)
    return SpectrumResult(
        energies=roots,
        method="MultiStepPoles",
        ordering=ordering,
        residuals=f,
        metadata={"n": grid.n, "tol": tol, "points": int(points)},
        diagnostics=tuple(diagnostics),
    )
