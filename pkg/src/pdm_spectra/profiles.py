"""Double-heterostructure models, the profile families and step discretization.

A double heterostructure has constant outer media (V0, m0) for z <= z0 and
(V2, m2) for z >= z1, with graded profiles V_in(z), m_in(z) in between.  All
quantities are dimensionless with hbar^2 / (2 M0) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidParameterError

__all__ = [
    "SymmetricRational",
    "GaussianMass",
    "GaussianMassDelta",
    "GaussianPotential",
    "GaussianPotentialDelta",
    "MorseLike",
    "HyperbolicMass",
    "ParabolicDouble",
    "Exponential",
    "SingularParabolicMass",
    "ExplicitSteps",
    "ProfileFamily",
    "HeterostructureModel",
    "StepGrid",
    "build_model",
    "eval_model",
    "discretize",
    "DEFAULT_N",
]

DEFAULT_N = 2000

Profile = Callable[[np.ndarray], np.ndarray]


def _nonzero(name, value):
    if value == 0 or not np.isfinite(value):
        raise InvalidParameterError(f"{name} must be a finite non-zero number, got {value!r}")


def _positive(name, value):
    if not (np.isfinite(value) and value > 0):
        raise InvalidParameterError(f"{name} must be positive, got {value!r}")


def _rational(z):
    return 1.0 / (1.0 + np.asarray(z, dtype=float) ** 2)


def _gauss_shape(z, z0):
    # exp(-(z/z0)^2 ln(1 + z0^2)); equals 1/(1+z0^2) at z = +-z0
    z = np.asarray(z, dtype=float)
    return np.exp(-(z * z) / (z0 * z0) * np.log1p(z0 * z0))


def _gauss_delta_shape(z, z0, delta):
    z = np.asarray(z, dtype=float)
    return (z0 * z0 * np.exp(-delta * z * z) + 1.0) / (1.0 + z0 * z0)


class ProfileFamily:
    """Base class of the profile families.

    Subclasses provide ``inner(z0, z1)`` returning the inner potential and mass
    callables, and may override ``outer`` (the rule fixing the outer media) and
    ``mass_derivatives`` (analytic m', m'').
    """

    def validate(self, z0, z1):
        pass

    def inner(self, z0, z1) -> tuple[Profile, Profile]:
        raise NotImplementedError

    def outer(self, z0, z1, V, m):
        # continuity at both junctions
        return float(V(z0)), float(m(z0)), float(V(z1)), float(m(z1))

    def mass_derivatives(self, z0, z1):
        return None


@dataclass(frozen=True)
class SymmetricRational(ProfileFamily):
    """V_in = -mu^2 / (1 + z^2), m_in = sigma^2 / (1 + z^2)."""

    mu: float
    sigma: float

    def __post_init__(self):
        _nonzero("mu", self.mu)
        _nonzero("sigma", self.sigma)

    def inner(self, z0, z1):
        mu2, s2 = self.mu**2, self.sigma**2
        return (lambda z: -mu2 * _rational(z)), (lambda z: s2 * _rational(z))

    def outer(self, z0, z1, V, m):
        return float(V(z0)), float(m(z0)), float(V(z0)), float(m(z0))

    def mass_derivatives(self, z0, z1):
        s2 = self.sigma**2

        def d(z):
            z = np.asarray(z, dtype=float)
            u = 1.0 + z * z
            return -2.0 * s2 * z / u**2, s2 * (6.0 * z * z - 2.0) / u**3

        return d


@dataclass(frozen=True)
class GaussianMass(SymmetricRational):
    """Rational potential with the Gaussian mass sigma^2 exp(-(z/z0)^2 ln(1+z0^2))."""

    def inner(self, z0, z1):
        mu2, s2 = self.mu**2, self.sigma**2
        return (lambda z: -mu2 * _rational(z)), (lambda z: s2 * _gauss_shape(z, z0))

    def mass_derivatives(self, z0, z1):
        return None


@dataclass(frozen=True)
class GaussianMassDelta(SymmetricRational):
    """Rational potential with mass sigma^2 (z0^2 exp(-delta z^2) + 1) / (1 + z0^2)."""

    delta: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        _positive("delta", self.delta)

    def inner(self, z0, z1):
        mu2, s2, dl = self.mu**2, self.sigma**2, self.delta
        return (lambda z: -mu2 * _rational(z)), (lambda z: s2 * _gauss_delta_shape(z, z0, dl))

    def mass_derivatives(self, z0, z1):
        return None


@dataclass(frozen=True)
class GaussianPotential(SymmetricRational):
    """Rational mass with the Gaussian potential -mu^2 exp(-(z/z0)^2 ln(1+z0^2))."""

    def inner(self, z0, z1):
        mu2, s2 = self.mu**2, self.sigma**2
        return (lambda z: -mu2 * _gauss_shape(z, z0)), (lambda z: s2 * _rational(z))


@dataclass(frozen=True)
class GaussianPotentialDelta(SymmetricRational):
    """Rational mass with potential -mu^2 (z0^2 exp(-delta z^2) + 1) / (1 + z0^2)."""

    delta: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        _positive("delta", self.delta)

    def inner(self, z0, z1):
        mu2, s2, dl = self.mu**2, self.sigma**2, self.delta
        return (lambda z: -mu2 * _gauss_delta_shape(z, z0, dl)), (lambda z: s2 * _rational(z))


@dataclass(frozen=True)
class MorseLike(ProfileFamily):
    """V_in = -V0M e^{sigma z} (2 - e^{sigma z}), m_in = m0M sigma^2 e^{-2 sigma z}."""

    V0M: float
    m0M: float
    sigma: float

    def __post_init__(self):
        _positive("m0M", self.m0M)
        _positive("sigma", self.sigma)
        if not np.isfinite(self.V0M):
            raise InvalidParameterError("V0M must be finite")

    def inner(self, z0, z1):
        v0, m0, s = self.V0M, self.m0M, self.sigma

        def V(z):
            e = np.exp(s * np.asarray(z, dtype=float))
            return -v0 * e * (2.0 - e)

        return V, (lambda z: m0 * s * s * np.exp(-2.0 * s * np.asarray(z, dtype=float)))

    def mass_derivatives(self, z0, z1):
        m0, s = self.m0M, self.sigma

        def d(z):
            m = m0 * s * s * np.exp(-2.0 * s * np.asarray(z, dtype=float))
            return -2.0 * s * m, 4.0 * s * s * m

        return d


@dataclass(frozen=True)
class HyperbolicMass(ProfileFamily):
    """Morse-like potential with a tanh-graded mass joining m_M(z0) to m_M(z1).

    m_in = m0M sigma^2 ((e^{-2 sigma z1} - e^{-2 sigma z0}) B(z) + e^{-2 sigma z0}),
    B(z) = tanh(-tau (z - z0)) / tanh(-tau (z1 - z0)).
    """

    tau: float
    m0M: float
    sigma: float
    V0M: float = 10.0

    def __post_init__(self):
        _positive("tau", self.tau)
        _positive("m0M", self.m0M)
        _positive("sigma", self.sigma)

    def inner(self, z0, z1):
        V, _ = MorseLike(self.V0M, self.m0M, self.sigma).inner(z0, z1)
        s, tau = self.sigma, self.tau
        lo, hi = np.exp(-2.0 * s * z0), np.exp(-2.0 * s * z1)
        scale = self.m0M * s * s
        den = np.tanh(-tau * (z1 - z0))

        def m(z):
            b = np.tanh(-tau * (np.asarray(z, dtype=float) - z0)) / den
            return scale * ((hi - lo) * b + lo)

        return V, m


@dataclass(frozen=True)
class ParabolicDouble(ProfileFamily):
    """Asymmetric pair of parabolic wells on [b, c) and [c, d).

    Lengths, energies and masses are taken as given (dimensionless unless
    converted by :mod:`pdm_spectra.units`).  The junctions are z0 = b, z1 = d.
    """

    a: float
    b: float
    c: float
    d: float
    V0: float
    m0: float
    m1: float

    def __post_init__(self):
        if not (self.a < self.c and self.b < self.c < self.d):
            raise InvalidParameterError("parabolic wells need a < c and b < c < d")
        _positive("m0", self.m0)
        _positive("m1", self.m1)

    def validate(self, z0, z1):
        if (z0, z1) != (self.b, self.d):
            raise InvalidParameterError("parabolic double well fixes z0 = b and z1 = d")

    def _shapes(self, z):
        z = np.asarray(z, dtype=float)
        c1, c2 = (self.c + self.a) / 2.0, (self.c - self.a) / 2.0
        c3, c4 = (self.d + self.c) / 2.0, (self.d - self.c) / 2.0
        return np.where(z < self.c, (z - c1) ** 2 / c2**2, (z - c3) ** 2 / c4**2)

    def inner(self, z0, z1):
        return (
            lambda z: self.V0 * self._shapes(z),
            lambda z: self.m1 + (self.m0 - self.m1) * self._shapes(z),
        )

    def outer(self, z0, z1, V, m):
        return float(self.V0), float(self.m0), float(self.V0), float(self.m0)


@dataclass(frozen=True)
class Exponential(ProfileFamily):
    """V_in = V_c e^{c z}, m_in = mu0 e^{c z}; V2 = V_in(z1) and V0 = lam * V2."""

    Vc: float
    mu0: float
    c: float
    lam: float = 1.0

    def __post_init__(self):
        _positive("Vc", self.Vc)
        _positive("mu0", self.mu0)
        _nonzero("c", self.c)

    def inner(self, z0, z1):
        vc, mu0, c = self.Vc, self.mu0, self.c
        return (
            lambda z: vc * np.exp(c * np.asarray(z, dtype=float)),
            lambda z: mu0 * np.exp(c * np.asarray(z, dtype=float)),
        )

    def outer(self, z0, z1, V, m):
        v2 = float(V(z1))
        return self.lam * v2, float(m(z0)), v2, float(m(z1))

    def mass_derivatives(self, z0, z1):
        mu0, c = self.mu0, self.c

        def d(z):
            m = mu0 * np.exp(c * np.asarray(z, dtype=float))
            return c * m, c * c * m

        return d


@dataclass(frozen=True)
class SingularParabolicMass(ProfileFamily):
    """m_in = c z^2, V_in = (A / c)(1/z^4 + B/z^2) for z > 0."""

    A: float
    B: float
    c: float

    def __post_init__(self):
        _positive("A", self.A)
        _positive("c", self.c)
        if not (np.isfinite(self.B) and self.B < 0):
            raise InvalidParameterError(f"B must be negative, got {self.B!r}")

    def validate(self, z0, z1):
        if z0 <= 0:
            raise InvalidParameterError("the singular profile is only defined for z0 > 0")

    def inner(self, z0, z1):
        A, B, c = self.A, self.B, self.c

        def V(z):
            z2 = np.asarray(z, dtype=float) ** 2
            return A / c * (1.0 / (z2 * z2) + B / z2)

        return V, (lambda z: c * np.asarray(z, dtype=float) ** 2)

    def mass_derivatives(self, z0, z1):
        c = self.c

        def d(z):
            z = np.asarray(z, dtype=float)
            return 2.0 * c * z, 2.0 * c * np.ones_like(z)

        return d


@dataclass(frozen=True)
class ExplicitSteps(ProfileFamily):
    """Piecewise-constant medium given verbatim.

    ``interfaces`` holds N strictly increasing positions, ``potentials`` and
    ``masses`` hold the N + 1 region values from left to right.
    """

    interfaces: tuple
    potentials: tuple
    masses: tuple

    def __post_init__(self):
        z = np.asarray(self.interfaces, dtype=float)
        if z.ndim != 1 or z.size < 1:
            raise InvalidParameterError("at least one interface is required")
        if np.any(np.diff(z) <= 0):
            raise InvalidParameterError("interface positions must be strictly increasing")
        if len(self.potentials) != z.size + 1 or len(self.masses) != z.size + 1:
            raise InvalidParameterError("need one potential and one mass per region (N + 1)")
        if np.any(np.asarray(self.masses, dtype=float) <= 0):
            raise InvalidParameterError("masses must be positive")
        object.__setattr__(self, "interfaces", tuple(float(x) for x in self.interfaces))
        object.__setattr__(self, "potentials", tuple(float(x) for x in self.potentials))
        object.__setattr__(self, "masses", tuple(float(x) for x in self.masses))

    def validate(self, z0, z1):
        if (z0, z1) != (self.interfaces[0], self.interfaces[-1]):
            raise InvalidParameterError("explicit steps fix z0 and z1 to the outer interfaces")

    def _lookup(self, values):
        zs = np.asarray(self.interfaces)
        vals = np.asarray(values)

        def f(z):
            # region j is (z_{j-1}, z_j]; ties go to the left region
            return vals[np.searchsorted(zs, np.asarray(z, dtype=float), side="left")]

        return f

    def inner(self, z0, z1):
        return self._lookup(self.potentials), self._lookup(self.masses)

    def outer(self, z0, z1, V, m):
        return self.potentials[0], self.masses[0], self.potentials[-1], self.masses[-1]


@dataclass(frozen=True)
class HeterostructureModel:
    """Outer constants, junction points and inner profiles of a double heterostructure."""

    z0: float
    z1: float
    V0: float
    V2: float
    m0: float
    m2: float
    inner_potential: Profile
    inner_mass: Profile
    family: ProfileFamily | None = None
    inner_mass_derivatives: Callable | None = field(default=None, repr=False)

    def eval(self, z):
        return eval_model(self, z)

    @property
    def threshold(self) -> float:
        """Lowest outer band edge, min(V0, V2)."""
        return min(self.V0, self.V2)


def _family_z_defaults(family):
    if isinstance(family, ParabolicDouble):
        return family.b, family.d
    if isinstance(family, ExplicitSteps):
        return family.interfaces[0], family.interfaces[-1]
    return None, None


def build_model(family: ProfileFamily, z0: float | None = None, z1: float | None = None):
    """Build the heterostructure for ``family`` on the inner interval (z0, z1).

    The parabolic double well and explicit steps fix their own junctions; all
    other families need ``z0`` and ``z1``.
    """
    if not isinstance(family, ProfileFamily):
        raise InvalidParameterError(f"not a profile family: {family!r}")
    d0, d1 = _family_z_defaults(family)
    z0 = d0 if z0 is None else float(z0)
    z1 = d1 if z1 is None else float(z1)
    if z0 is None or z1 is None:
        raise InvalidParameterError(f"{type(family).__name__} needs junction points z0 and z1")
    single = isinstance(family, ExplicitSteps) and len(family.interfaces) == 1
    if not (z0 < z1 or (single and z0 == z1)):
        raise InvalidParameterError(f"need z0 < z1, got z0={z0}, z1={z1}")
    family.validate(z0, z1)
    V, m = family.inner(z0, z1)
    if not isinstance(family, ExplicitSteps):
        probe = np.linspace(z0, z1, 257)
        mp = m(probe)
        if np.any(~np.isfinite(mp)) or np.any(mp <= 0):
            raise InvalidParameterError("inner mass must be positive on [z0, z1]")
    V0, m0, V2, m2 = family.outer(z0, z1, V, m)
    if m0 <= 0 or m2 <= 0:
        raise InvalidParameterError("outer masses must be positive")
    return HeterostructureModel(
        z0=z0,
        z1=z1,
        V0=float(V0),
        V2=float(V2),
        m0=float(m0),
        m2=float(m2),
        inner_potential=V,
        inner_mass=m,
        family=family,
        inner_mass_derivatives=family.mass_derivatives(z0, z1),
    )


def eval_model(model: HeterostructureModel, z):
    """(V, m) at ``z``: outer constants for z <= z0 and z >= z1, inner profiles between."""
    z = np.asarray(z, dtype=float)
    left = z <= model.z0
    right = z >= model.z1
    inside = ~(left | right)
    zi = np.where(inside, z, 0.5 * (model.z0 + model.z1))
    V = np.where(left, model.V0, np.where(right, model.V2, model.inner_potential(zi)))
    m = np.where(left, model.m0, np.where(right, model.m2, model.inner_mass(zi)))
    if V.ndim == 0:
        return float(V), float(m)
    return V, m


@dataclass(frozen=True)
class StepGrid:
    """Piecewise-constant medium: N interfaces and N + 1 regions (V_j, m_j).

    ``n`` is the number of inner slabs (N - 1); region 0 is the left outer
    medium and region N the right one.
    """

    interfaces: np.ndarray
    potentials: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.interfaces, dtype=float)
        V = np.asarray(self.potentials, dtype=float)
        m = np.asarray(self.masses, dtype=float)
        if z.ndim != 1 or z.size < 1 or V.shape != (z.size + 1,) or m.shape != V.shape:
            raise InvalidParameterError("a step grid needs N >= 1 interfaces and N + 1 regions")
        if np.any(np.diff(z) <= 0):
            raise InvalidParameterError("interface positions must be strictly increasing")
        if np.any(m <= 0):
            raise InvalidParameterError("region masses must be positive")
        for name, arr in (("interfaces", z), ("potentials", V), ("masses", m)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.interfaces.size - 1

    @property
    def n_interfaces(self) -> int:
        return self.interfaces.size

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.interfaces)

    def shifted(self, a: float) -> StepGrid:
        return StepGrid(self.interfaces + a, self.potentials.copy(), self.masses.copy())

    def mirrored(self) -> StepGrid:
        return StepGrid(-self.interfaces[::-1], self.potentials[::-1].copy(), self.masses[::-1].copy())


def discretize(model: HeterostructureModel, n: int = DEFAULT_N) -> StepGrid:
    """Approximate ``model`` by ``n`` uniform slabs sampled at their midpoints.

    The slabs are bounded by n + 1 interfaces from z0 to z1.  Explicit step
    models are returned verbatim whatever ``n`` is.
    """
    if isinstance(model.family, ExplicitSteps):
        f = model.family
        return StepGrid(np.array(f.interfaces), np.array(f.potentials), np.array(f.masses))
    n = int(n)
    if n < 1:
        raise InvalidParameterError(f"n must be a positive integer, got {n}")
    z = np.linspace(model.z0, model.z1, n + 1)
    mid = 0.5 * (z[1:] + z[:-1])
    V = np.concatenate([[model.V0], model.inner_potential(mid), [model.V2]])
    m = np.concatenate([[model.m0], model.inner_mass(mid), [model.m2]])
    return StepGrid(z, V, m)
