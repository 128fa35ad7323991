"""Analytic inner solutions, the matching determinant and the substitution transforms.

For the four exactly solvable profile families the inner equation

    -(psi' / m)' - (1/2)(nu m'' / m^2 - eta m'^2 / m^3) psi + (V - E) psi = 0

has two independent solutions psi1, psi2 in closed form.  Matching them to the
decaying outer exponentials R e^{eta0 z} and T e^{-eta2 z} gives a 2 x 2
homogeneous system whose determinant vanishes at the bound-state energies.

The Whittaker pair M_{k,m}, W_{k,m} becomes linearly dependent whenever
1/2 + m - k is a non-positive integer, and the raw determinant then has
spurious zeros.  The root function therefore uses Gamma(1/2 + m - k) W_{k,m},
whose Wronskian with M_{k,m} is the constant -Gamma(1 + 2m).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import (
    ConditionViolationError,
    InvalidParameterError,
    NoBoundStateError,
    NumericalInconsistencyError,
    SpecialFunctionDomainError,
    UnsupportedAnalyticError,
)
from .multistep import SpectrumResult
from .orderings import OrderingKind, nu_eta, parse_ordering
from .profiles import (
    Exponential,
    HeterostructureModel,
    MorseLike,
    SingularParabolicMass,
    SymmetricRational,
)
from .specialfn import gamma, gauss_2f1, whittaker_m, whittaker_w

__all__ = [
    "BasisFamily",
    "InnerBasis",
    "MatchingMatrix",
    "Wavefunction",
    "QuarterPowerTransform",
    "HalfPowerTransform",
    "basis_family",
    "inner_basis",
    "phi_coefficients",
    "matching_matrix",
    "det_x",
    "root_function",
    "solve_transcendental",
    "wavefunction",
    "transform_quarter_power",
    "transform_half_power",
    "richardson_derivative",
    "DEFAULT_SCAN_POINTS",
]

DEFAULT_SCAN_POINTS = 2000
IMAG_RESIDUE = 1e-8
ROOT_RESIDUAL = 1e-4
_POLE_GUARD = 1e-9


class BasisFamily(enum.Enum):
    SYMMETRIC = "symmetric"
    MORSE = "morse"
    EXPONENTIAL = "exponential"
    SINGULAR = "singular"


def richardson_derivative(f, z):
    """Central difference with one Richardson step, h = 1e-5 |z| + 1e-7."""
    z = np.asarray(z, dtype=float)
    h = 1e-5 * np.abs(z) + 1e-7
    # one call on the whole stencil keeps vectorized bases cheap
    pts = np.stack([z + h, z - h, z + h / 2, z - h / 2])
    fp, fm, hp, hm = np.asarray(f(pts.ravel())).reshape(pts.shape)
    d1 = (fp - fm) / (2.0 * h)
    d2 = (hp - hm) / h
    return (4.0 * d2 - d1) / 3.0


def _second_derivative(f, z):
    z = np.asarray(z, dtype=float)
    h = 1e-3 * (1.0 + np.abs(z))

    def d2(s):
        return (f(z + s) - 2.0 * f(z) + f(z - s)) / (s * s)

    return (4.0 * d2(h / 2) - d2(h)) / 3.0


@dataclass(frozen=True)
class InnerBasis:
    """Two independent inner solutions psi(z, E) and their z-derivatives.

    ``weight(E)`` is the factor that makes (psi1, weight * psi2) independent
    at every E; it is 1 where the raw pair never degenerates.
    """

    family: BasisFamily
    psi1: Callable
    psi2: Callable
    dpsi1: Callable
    dpsi2: Callable
    params: Callable
    weight: Callable = field(default=lambda E: 1.0)

    def wronskian(self, z, E):
        return self.psi1(z, E) * self.dpsi2(z, E) - self.psi2(z, E) * self.dpsi1(z, E)


def basis_family(model: HeterostructureModel) -> BasisFamily:
    """Solvable family of ``model``; raises for profiles without closed-form bases."""
    fam = model.family
    if type(fam) is SymmetricRational:
        return BasisFamily.SYMMETRIC
    if type(fam) is MorseLike:
        return BasisFamily.MORSE
    if type(fam) is Exponential:
        return BasisFamily.EXPONENTIAL
    if type(fam) is SingularParabolicMass:
        return BasisFamily.SINGULAR
    name = type(fam).__name__ if fam is not None else "custom"
    raise UnsupportedAnalyticError(f"no closed-form inner solutions for the {name} profile")


def _with_derivatives(family, psi1, psi2, params, weight=lambda E: 1.0):
    def d(f):
        return lambda z, E: richardson_derivative(lambda s: f(s, E), z)

    return InnerBasis(family, psi1, psi2, d(psi1), d(psi2), params, weight)


def _symmetric_basis(fam, nu, eta):
    mu, sigma = fam.mu, fam.sigma
    s2 = mu * mu * sigma * sigma + 2.0 * eta - 4.0 * nu
    if s2 < 0:
        raise NoBoundStateError(f"lambda is complex (mu^2 sigma^2 + 2 eta - 4 nu = {s2:.9g})")
    lam = 0.5 + math.sqrt(s2)
    if lam * (lam - 1.0) <= 0:
        raise NoBoundStateError(f"lambda (lambda - 1) = {lam * (lam - 1.0):.9g} <= 0")
    shift = (0.25 + 2.0 * eta - 3.0 * nu) / (sigma * sigma)

    def params(E):
        kappa = complex(np.sqrt(complex(E - shift)))
        return {"lambda": lam, "kappa": kappa, "a": (lam + 1j * kappa * sigma) / 2, "b": (lam - 1j * kappa * sigma) / 2}

    def pref(z):
        u = 1.0 + z * z
        return (sigma * sigma / u) ** 0.25 * u ** (lam / 2.0)

    def psi1(z, E):
        p = params(E)
        z = np.asarray(z, dtype=float)
        return pref(z) * gauss_2f1(p["a"], p["b"], 0.5, -z * z)

    def psi2(z, E):
        p = params(E)
        z = np.asarray(z, dtype=float)
        return pref(z) * z * gauss_2f1(p["a"] + 0.5, p["b"] + 0.5, 1.5, -z * z)

    def dpref(z):
        # d/dz log pref = (lam - 1/2) z / (1 + z^2)
        return pref(z) * (lam - 0.5) * z / (1.0 + z * z)

    def dpsi1(z, E):
        # d/dx 2F1(a, b; c; x) = (a b / c) 2F1(a + 1, b + 1; c + 1; x)
        p = params(E)
        a, b = p["a"], p["b"]
        z = np.asarray(z, dtype=float)
        x = -z * z
        return dpref(z) * gauss_2f1(a, b, 0.5, x) - 2.0 * z * pref(z) * (a * b / 0.5) * gauss_2f1(a + 1, b + 1, 1.5, x)

    def dpsi2(z, E):
        p = params(E)
        a, b = p["a"] + 0.5, p["b"] + 0.5
        z = np.asarray(z, dtype=float)
        x = -z * z
        f = gauss_2f1(a, b, 1.5, x)
        df = (a * b / 1.5) * gauss_2f1(a + 1, b + 1, 2.5, x)
        return (dpref(z) * z + pref(z)) * f - 2.0 * z * z * pref(z) * df

    return InnerBasis(BasisFamily.SYMMETRIC, psi1, psi2, dpsi1, dpsi2, params)


def _morse_basis(fam, nu, eta):
    v0, m0, sigma = fam.V0M, fam.m0M, fam.sigma
    r2 = 1.0 + m0 * v0 + 2.0 * eta - 2.0 * nu
    if r2 < 0:
        raise InvalidParameterError(f"r^2 = 1 + m0 V0 + 2 eta - 2 nu = {r2:.9g} < 0")
    r = math.sqrt(r2)
    sm = math.sqrt(m0)

    def params(E):
        if not E < 0:
            raise InvalidParameterError("the Morse basis is built for bound states, E < 0")
        return {"q": v0 * sm / math.sqrt(-E), "r": r, "s": math.sqrt(-E) * sm}

    def y_of(z, E):
        return 2.0 * params(E)["s"] * np.exp(-sigma * np.asarray(z, dtype=float))

    def pref(z):
        return m0**0.25 * math.sqrt(sigma) * np.exp(-sigma * np.asarray(z, dtype=float) / 2.0)

    def psi1(z, E):
        return pref(z) * whittaker_m(params(E)["q"], r, y_of(z, E))

    def psi2(z, E):
        return pref(z) * whittaker_w(params(E)["q"], r, y_of(z, E))

    def weight(E):
        return gamma(0.5 + r - params(E)["q"])

    return _with_derivatives(BasisFamily.MORSE, psi1, psi2, params, weight)


def _exponential_basis(fam, nu, eta):
    vc, mu0, c = fam.Vc, fam.mu0, fam.c
    if not c > 0:
        raise InvalidParameterError("the exponential basis needs c > 0")
    m2 = (1.0 + 2.0 * eta - 2.0 * nu) / 4.0
    # imaginary order for 1 + 2 eta - 2 nu < 0 (T_L); M and W stay independent
    mu = math.sqrt(m2) if m2 >= 0 else 1j * math.sqrt(-m2)
    omega = c * math.sqrt(vc / mu0)
    y0 = 2.0 * math.sqrt(vc * mu0) / c

    def params(E):
        return {"kappa": E / (2.0 * omega), "mu": mu, "omega": omega}

    def y_of(z):
        return y0 * np.exp(c * np.asarray(z, dtype=float))

    def psi1(z, E):
        return whittaker_m(params(E)["kappa"], mu, y_of(z))

    def psi2(z, E):
        return whittaker_w(params(E)["kappa"], mu, y_of(z))

    def weight(E):
        return gamma(0.5 + mu - params(E)["kappa"])

    return _with_derivatives(BasisFamily.EXPONENTIAL, psi1, psi2, params, weight)


def _singular_basis(fam, nu, eta):
    A, B, c = fam.A, fam.B, fam.c
    F = (5.0 + 8.0 * eta - 4.0 * nu + 4.0 * A) / 16.0
    G = A * B / (2.0 * math.sqrt(c))
    if not F > 0:
        raise ConditionViolationError("F > 0", f"F = (5 + 8 eta - 4 nu + 4A) / 16 = {F:.9g} is not positive")
    if not G < 0:
        raise ConditionViolationError("G < 0", f"G = AB / (2 sqrt(c)) = {G:.9g} is not negative")
    mu = math.sqrt(0.25 + F)

    def params(E):
        if not E < 0:
            raise InvalidParameterError("the singular basis is built for bound states, E < 0")
        return {"kappa": -G / (2.0 * math.sqrt(-E)), "mu": mu, "F": F, "G": G}

    def y_of(z, E):
        return math.sqrt(-E) * math.sqrt(c) * np.asarray(z, dtype=float) ** 2

    def pref(z):
        return c**0.25 * np.sqrt(np.asarray(z, dtype=float))

    def psi1(z, E):
        return pref(z) * whittaker_m(params(E)["kappa"], mu, y_of(z, E))

    def psi2(z, E):
        return pref(z) * whittaker_w(params(E)["kappa"], mu, y_of(z, E))

    def weight(E):
        return gamma(0.5 + mu - params(E)["kappa"])

    return _with_derivatives(BasisFamily.SINGULAR, psi1, psi2, params, weight)


_BUILDERS = {
    BasisFamily.SYMMETRIC: _symmetric_basis,
    BasisFamily.MORSE: _morse_basis,
    BasisFamily.EXPONENTIAL: _exponential_basis,
    BasisFamily.SINGULAR: _singular_basis,
}


def inner_basis(family, model: HeterostructureModel, ordering) -> InnerBasis:
    """Closed-form inner solutions of ``model`` for ``ordering``.

    ``family`` is a :class:`BasisFamily` (or its value) that must agree with
    the profile of ``model``; ``None`` infers it.
    """
    ordering = parse_ordering(ordering)
    found = basis_family(model)
    if family is not None and BasisFamily(family) is not found:
        raise InvalidParameterError(f"model profile is {found.value}, not {BasisFamily(family).value}")
    nu, eta = nu_eta(ordering)
    return _BUILDERS[found](model.family, nu, eta)


def _matching_ordering(ordering):
    ordering = parse_ordering(ordering)
    canon = ordering.canonical()
    if canon.kind not in (OrderingKind.BDD, OrderingKind.ZK):
        raise UnsupportedAnalyticError(
            f"analytic matching is only available for BD-D and Z-K, not {ordering.label}"
        )
    return ordering, canon.kind


def _outer_decay(model, E):
    if not E < model.threshold:
        raise InvalidParameterError(
            f"bound states need E < min(V0, V2) = {model.threshold:.9g}, got {E:.9g}"
        )
    return math.sqrt(model.m0 * (model.V0 - E)), math.sqrt(model.m2 * (model.V2 - E))


def _phi(model, kind, basis, E, weight=1.0):
    """Phi values [[Phi11, Phi12], [Phi21, Phi22]] and the basis values at z0, z1."""
    eta0, eta2 = _outer_decay(model, E)
    z = np.array([model.z0, model.z1])
    m = model.inner_mass
    psi = [basis.psi1, lambda s, e: weight * basis.psi2(s, e)]
    dpsi = [basis.dpsi1, lambda s, e: weight * basis.dpsi2(s, e)]
    vals = np.array([np.asarray(p(z, E), dtype=complex) for p in psi]).T
    phi = np.empty((2, 2), dtype=complex)
    for i, p in enumerate(psi):
        if kind is OrderingKind.BDD:
            d = dpsi[i](z, E)
            phi[0, i] = -(model.m0 / m(model.z0)) * d[0] / eta0
            phi[1, i] = (model.m2 / m(model.z1)) * d[1] / eta2
        else:
            # (psi / sqrt m)' = psi' / sqrt m - psi m' / (2 m^{3/2})
            mz = m(z)
            dm = model.inner_mass_derivatives(z)[0] if model.inner_mass_derivatives else richardson_derivative(m, z)
            d = dpsi[i](z, E) / np.sqrt(mz) - vals[:, i] * dm / (2.0 * mz**1.5)
            sq = np.sqrt(mz)
            phi[0, i] = -sq[0] * d[0] / eta0
            phi[1, i] = sq[1] * d[1] / eta2
    return phi, vals


def phi_coefficients(model: HeterostructureModel, ordering, basis: InnerBasis, E: float):
    """The four matching coefficients [[Phi11, Phi12], [Phi21, Phi22]] at energy E."""
    _, kind = _matching_ordering(ordering)
    phi, _ = _phi(model, kind, basis, float(E))
    return phi


@dataclass(frozen=True)
class MatchingMatrix:
    """X_{1i} = psi_i(z0) + Phi_{1i}, X_{2i} = psi_i(z1) + Phi_{2i}."""

    entries: np.ndarray
    phi: np.ndarray
    values: np.ndarray

    @property
    def det(self) -> complex:
        X = self.entries
        return complex(X[0, 0] * X[1, 1] - X[0, 1] * X[1, 0])

    @property
    def scale(self) -> float:
        """Squared Frobenius norm of the term magnitudes |psi_i| + |Phi_i|.

        It bounds 2 |det| and stays away from zero when single entries
        cancel, so det / scale is a smooth, well-scaled function of E.
        """
        t = np.abs(self.values) + np.abs(self.phi)
        return float(np.sum(t * t))


def _nudge(basis, E):
    # keep Gamma(1/2 + mu - kappa) away from its poles
    for _ in range(8):
        try:
            w = complex(basis.weight(E))
        except SpecialFunctionDomainError:
            w = complex(np.inf)
        if np.isfinite(w) and abs(w) < 1e300:
            return E, w
        E = E + _POLE_GUARD * max(1.0, abs(E))
    raise NumericalInconsistencyError(f"basis weight is singular near E={E:.9g}")


def _matrix(model, ordering, E, basis=None, normalized=True):
    ordering, kind = _matching_ordering(ordering)
    basis = basis if basis is not None else inner_basis(None, model, ordering)
    w = 1.0
    if normalized:
        E, w = _nudge(basis, E)
    phi, vals = _phi(model, kind, basis, E, w)
    return MatchingMatrix(vals + phi, phi, vals)


def matching_matrix(
    model: HeterostructureModel, ordering, E: float, basis=None, normalized: bool = True
) -> MatchingMatrix:
    """Matching matrix at E.

    With ``normalized`` the second solution carries the basis weight, so the
    two columns stay independent at every E; ``False`` uses the raw pair.
    """
    return _matrix(model, ordering, float(E), basis, normalized)


def _real(value, scale, what):
    if abs(value.imag) > IMAG_RESIDUE * max(scale, abs(value)):
        raise NumericalInconsistencyError(
            f"{what} has imaginary part {value.imag:.3g} against magnitude {max(scale, abs(value)):.3g}"
        )
    return value.real


def det_x(model: HeterostructureModel, ordering, E: float, basis=None, normalized: bool = True) -> float:
    """Real determinant of the matching matrix at E.

    The imaginary residue must stay below 1e-8 of the matrix scale, otherwise
    NumericalInconsistencyError is raised.
    """
    X = matching_matrix(model, ordering, E, basis, normalized)
    return _real(X.det, X.scale, "det X")


def root_function(model: HeterostructureModel, ordering, E: float, basis=None) -> float:
    """det(X) / scale on the normalized basis.

    Real, continuous in E and free of the spurious zeros that the raw
    Whittaker pair produces where it degenerates.
    """
    X = matching_matrix(model, ordering, E, basis)
    scale = X.scale
    if scale == 0 or not np.isfinite(scale):
        raise NumericalInconsistencyError(f"matching matrix is degenerate at E={E:.9g}")
    return _real(X.det, scale, "det X") / scale


def solve_transcendental(
    model: HeterostructureModel,
    ordering,
    E_min: float,
    E_max: float,
    tol: float = 1e-8,
    points: int = DEFAULT_SCAN_POINTS,
) -> SpectrumResult:
    """Bound states in [E_min, E_max] as roots of the matching determinant.

    The normalized determinant is scanned on ``points`` energies, sign changes
    are bisected to floating-point resolution (never coarser than ``tol``)
    and a root is kept when the determinant at
    the midpoint is small compared with the bracket ends (sign changes across
    a singularity fail that test and are reported in ``diagnostics``).
    """
    ordering, _ = _matching_ordering(ordering)
    if not E_min < E_max:
        raise InvalidParameterError("need E_min < E_max")
    if E_max > model.threshold:
        raise InvalidParameterError(
            f"bound-state search needs E_max <= min(V0, V2) = {model.threshold:.9g}, got {E_max:.9g}"
        )
    if not tol > 0:
        raise InvalidParameterError("tol must be positive")
    basis = inner_basis(None, model, ordering)
    top = E_max if E_max < model.threshold else E_max - 1e-9 * max(1.0, abs(E_max))
    E = np.linspace(E_min, top, int(points))

    def f(e):
        return root_function(model, ordering, e, basis)

    g = np.array([f(e) for e in E])
    roots, residuals, diagnostics = [], [], []
    for i in np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) <= 0)[0]:
        if g[i] == 0:
            if i == 0 or g[i - 1] != 0:
                roots.append(E[i])
                residuals.append(0.0)
            continue
        if g[i + 1] == 0:
            continue
        lo, hi, glo = E[i], E[i + 1], g[i]
        # halve to floating-point resolution; the wavefunction needs the
        # extra digits when one column of X varies steeply with E
        while True:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi or hi - lo <= 4 * np.finfo(float).eps * abs(mid):
                break
            gm = f(mid)
            if gm == 0:
                lo = hi = mid
                break
            if np.sign(gm) == np.sign(glo):
                lo, glo = mid, gm
            else:
                hi = mid
        root = 0.5 * (lo + hi)
        res = abs(f(root)) / max(abs(g[i]), abs(g[i + 1]))
        if res < ROOT_RESIDUAL:
            roots.append(root)
            residuals.append(abs(f(root)))
        else:
            diagnostics.append(f"sign change at E={root:.9g} rejected as a singularity, ratio={res:.3g}")
    return SpectrumResult(
        energies=np.array(roots),
        method="Transcendental",
        ordering=ordering,
        residuals=np.array(residuals),
        metadata={"n": None, "tol": tol, "points": int(points)},
        diagnostics=tuple(diagnostics),
    )


@dataclass(frozen=True)
class Wavefunction:
    """Piecewise bound state: R e^{eta0 z}, P psi1 + Q psi2, T e^{-eta2 z}."""

    model: HeterostructureModel
    E: float
    R: float
    P: complex
    Q: complex
    T: complex
    eta0: float
    eta2: float
    basis: InnerBasis = field(repr=False)
    weight: complex = 1.0
    residual: float = 0.0

    def inner(self, z):
        z = np.asarray(z, dtype=float)
        return self.P * self.basis.psi1(z, self.E) + self.Q * self.weight * self.basis.psi2(z, self.E)

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        m = self.model
        out = np.empty(z.shape, dtype=complex)
        left, right = z <= m.z0, z >= m.z1
        inside = ~(left | right)
        out[left] = self.R * np.exp(self.eta0 * z[left])
        out[right] = self.T * np.exp(-self.eta2 * z[right])
        if np.any(inside):
            out[inside] = self.inner(z[inside])
        return out if out.ndim else complex(out)

    def to_csv(self, z) -> str:
        z = np.atleast_1d(np.asarray(z, dtype=float))
        psi = np.atleast_1d(self(z))
        lines = ["z,Re_psi,Im_psi"]
        lines += [f"{a:.9g},{b.real:.9g},{b.imag:.9g}" for a, b in zip(z, psi)]
        return "\n".join(lines) + "\n"


def wavefunction(model: HeterostructureModel, ordering, E: float, normalization_R: float = 1.0) -> Wavefunction:
    """Bound state at a root E with left amplitude R = ``normalization_R``.

    P and Q follow from the two matching equations at z0, T from continuity at
    z1.  The matching equation at z1 then holds only if E is a root; its
    relative residual above 1e-4 raises NumericalInconsistencyError.
    """
    ordering, kind = _matching_ordering(ordering)
    basis = inner_basis(None, model, ordering)
    E, w = _nudge(basis, float(E))
    phi, vals = _phi(model, kind, basis, E, w)
    eta0, eta2 = _outer_decay(model, E)
    R = float(normalization_R)
    D = phi[0, 0] * vals[0, 1] - phi[0, 1] * vals[0, 0]
    if D == 0:
        raise NumericalInconsistencyError(f"matching at z0 is singular at E={E:.9g}")
    lead = math.exp(eta0 * model.z0) * R
    P = -(phi[0, 1] + vals[0, 1]) / D * lead
    Q = (phi[0, 0] + vals[0, 0]) / D * lead
    T = (P * vals[1, 0] + Q * vals[1, 1]) * math.exp(eta2 * model.z1)
    X = vals + phi
    row = P * X[1, 0] + Q * X[1, 1]
    terms = abs(P) * (abs(vals[1, 0]) + abs(phi[1, 0])) + abs(Q) * (abs(vals[1, 1]) + abs(phi[1, 1]))
    residual = abs(row) / max(terms, 1e-300)
    if residual > ROOT_RESIDUAL:
        raise NumericalInconsistencyError(
            f"E={E:.9g} is not a root of the matching determinant "
            f"(relative residual {residual:.3g}); the reconstruction is ill-conditioned"
        )
    return Wavefunction(model, E, R, complex(P), complex(Q), complex(T), eta0, eta2, basis, w, float(residual))


def _mass_derivatives(model):
    if model.inner_mass_derivatives is not None:
        return model.inner_mass_derivatives
    m = model.inner_mass

    def d(z):
        return richardson_derivative(m, z), _second_derivative(m, z)

    return d


@dataclass(frozen=True)
class QuarterPowerTransform:
    """psi = m^{1/4} phi, rho = int sqrt(m) dz; unpacks as (rho, v_tilde)."""

    rho: Callable
    v_tilde: Callable
    z_of_rho: Callable
    v_tilde_z: Callable

    def __iter__(self):
        return iter((self.rho, self.v_tilde))


def transform_quarter_power(model: HeterostructureModel, ordering, rho_offset: float = 0.0):
    """Map the inner problem to constant mass.

    rho(z) = rho_offset + int_{z0}^{z} sqrt(m) and
    V~ = V + (1/2)(eta + 7/8) m'^2 / m^3 - (1/2)(nu + 1/2) m'' / m^2.
    """
    nu, eta = nu_eta(parse_ordering(ordering))
    m, V = model.inner_mass, model.inner_potential
    dm = _mass_derivatives(model)
    z0, z1 = model.z0, model.z1

    def sqrt_m(s):
        return math.sqrt(float(m(s)))

    def rho_scalar(z):
        return rho_offset + quad(sqrt_m, z0, z, epsabs=0.0, epsrel=1e-13, limit=200)[0]

    def rho(z):
        z = np.asarray(z, dtype=float)
        out = np.vectorize(rho_scalar, otypes=[float])(z)
        return float(out) if out.ndim == 0 else out

    def v_tilde_z(z):
        z = np.asarray(z, dtype=float)
        m1, m2 = dm(z)
        mz = m(z)
        return V(z) + 0.5 * (eta + 0.875) * m1**2 / mz**3 - 0.5 * (nu + 0.5) * m2 / mz**2

    r0, r1 = rho_scalar(z0), rho_scalar(z1)

    def z_scalar(r):
        if not (min(r0, r1) - 1e-12 <= r <= max(r0, r1) + 1e-12):
            raise InvalidParameterError(f"rho={r:.9g} lies outside the mapped interval")
        return brentq(lambda s: rho_scalar(s) - r, z0, z1, xtol=1e-14, rtol=4 * np.finfo(float).eps)

    def z_of_rho(r):
        r = np.asarray(r, dtype=float)
        out = np.vectorize(z_scalar, otypes=[float])(r)
        return float(out) if out.ndim == 0 else out

    def v_tilde(r):
        out = v_tilde_z(z_of_rho(r))
        return float(out) if np.ndim(out) == 0 else out

    return QuarterPowerTransform(rho, v_tilde, z_of_rho, v_tilde_z)


@dataclass(frozen=True)
class HalfPowerTransform:
    """psi = m^{1/2} Phi; unpacks as (v_star, rule).

    ``combined(z, E)`` is V* - E*, ``e_star(E)`` the constant term (``None``
    when no constant term is identified) and ``v_star(z, E)`` their sum.
    """

    combined: Callable
    e_star: Callable | None
    rule: str
    omega_sq: Callable | None = None
    g: float | None = None

    def v_star(self, z, E):
        e = self.e_star(E) if self.e_star is not None else 0.0
        return self.combined(z, E) + e

    def __iter__(self):
        return iter((self.v_star, self.rule))


def transform_half_power(model: HeterostructureModel, ordering) -> HalfPowerTransform:
    """V* - E* = (1/4)(m'/m)^2 (3 + 2 eta) - (1/2)(m''/m)(1 + nu) + (V - E) m."""
    nu, eta = nu_eta(parse_ordering(ordering))
    m, V = model.inner_mass, model.inner_potential
    dm = _mass_derivatives(model)

    def combined(z, E):
        z = np.asarray(z, dtype=float)
        m1, m2 = dm(z)
        mz = m(z)
        return 0.25 * (m1 / mz) ** 2 * (3.0 + 2.0 * eta) - 0.5 * (m2 / mz) * (1.0 + nu) + (V(z) - E) * mz

    fam = model.family
    if type(fam) is Exponential:
        e_star = fam.c**2 * (-1.0 - 2.0 * eta + 2.0 * nu) / 4.0
        return HalfPowerTransform(
            combined,
            lambda E: e_star,
            "E* = c^2 (-1 - 2 eta + 2 nu) / 4",
        )
    if type(fam) is SingularParabolicMass:
        g = 2.0 * (2.0 + 2.0 * eta - nu) + 2.0 * fam.A
        return HalfPowerTransform(
            combined,
            lambda E: -fam.A * fam.B,
            "E* = -AB, omega^2 = -4 c E, g = 2(2 + 2 eta - nu) + 2A",
            omega_sq=lambda E: -4.0 * fam.c * E,
            g=g,
        )
    probe = np.linspace(model.z0, model.z1, 33)
    m1, m2 = dm(probe)
    if np.all(np.abs(m1) <= 1e-10 * np.abs(m(probe))) and np.all(np.abs(m2) <= 1e-10 * np.abs(m(probe))):
        mc = float(m(probe[0]))
        return HalfPowerTransform(combined, lambda E: E * mc, "constant mass: E* = E m")
    return HalfPowerTransform(combined, None, "no constant E* term for this profile")
