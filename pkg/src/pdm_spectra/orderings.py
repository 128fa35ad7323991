"""Kinetic-energy-operator orderings and their junction conditions.

An ordering of the von Roos operator is fixed by the exponents
(alpha, beta, gamma) with alpha + beta + gamma = -1.  Only two derived
constants enter the effective Schrödinger equation,

    nu  = alpha + gamma
    eta = 2 (alpha + gamma + alpha * gamma)

while the junction conditions at an abrupt mass step are

    psi(z-)  = mu  * psi(z+)
    psi'(z-) = rho * psi'(z+)

with (mu, rho) depending on the masses on both sides.  Junction conditions are
only known for the symmetric family alpha = gamma (which contains BD-D and
Z-K) and for the T_L operator; L-K, G-W and general (alpha, gamma) pairs
carry (nu, eta) only.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidParameterError, SingularInterfaceError, UnsupportedMatchingError

__all__ = [
    "OrderingKind",
    "OrderingSpec",
    "BDD",
    "ZK",
    "LK",
    "GW",
    "TL",
    "von_roos",
    "parse_ordering",
    "nu_eta",
    "can_match",
    "boundary_coeffs",
    "step_reflection_factor",
    "DHContext",
    "ExponentialDH",
    "SingularDH",
    "g_parameter",
    "IsotonicClass",
    "classify_isotonic",
]


class OrderingKind(enum.Enum):
    VON_ROOS_SYMMETRIC = "vr"
    VON_ROOS = "vr2"
    TL = "tl"
    BDD = "bdd"
    ZK = "zk"
    LK = "lk"
    GW = "gw"


# (alpha, gamma) of the named orderings
_NAMED_EXPONENTS = {
    OrderingKind.BDD: (0.0, 0.0),
    OrderingKind.ZK: (-0.5, -0.5),
    OrderingKind.LK: (0.0, -0.5),
    OrderingKind.GW: (-1.0, 0.0),
    OrderingKind.TL: (0.0, -2.0 / 3.0),
}

_LABELS = {
    OrderingKind.BDD: "BD-D",
    OrderingKind.ZK: "Z-K",
    OrderingKind.LK: "L-K",
    OrderingKind.GW: "G-W",
    OrderingKind.TL: "T_L",
}


@dataclass(frozen=True)
class OrderingSpec:
    """A kinetic-energy-operator ordering.

    ``alpha`` is only meaningful for ``VON_ROOS_SYMMETRIC`` (where gamma = alpha
    and beta = -1 - 2 alpha) and, together with ``gamma``, for the general
    ``VON_ROOS`` kind; the named orderings carry their own exponents.
    """

    kind: OrderingKind
    alpha: float | None = None
    gamma: float | None = None

    def __post_init__(self):
        if self.kind is OrderingKind.VON_ROOS_SYMMETRIC:
            if self.alpha is None or not np.isfinite(self.alpha):
                raise InvalidParameterError("symmetric von Roos ordering needs a finite alpha")
            if self.gamma is not None:
                raise InvalidParameterError("symmetric von Roos ordering takes alpha only")
        elif self.kind is OrderingKind.VON_ROOS:
            if self.alpha is None or self.gamma is None or not np.isfinite([self.alpha, self.gamma]).all():
                raise InvalidParameterError("von Roos ordering needs finite alpha and gamma")
        elif self.alpha is not None or self.gamma is not None:
            raise InvalidParameterError(f"{self.kind.value} takes no exponent parameters")

    @property
    def exponents(self) -> tuple[float, float, float]:
        """(alpha, beta, gamma)."""
        if self.kind is OrderingKind.VON_ROOS_SYMMETRIC:
            a = float(self.alpha)
            return a, -1.0 - 2.0 * a, a
        if self.kind is OrderingKind.VON_ROOS:
            a, g = float(self.alpha), float(self.gamma)
            return a, -1.0 - a - g, g
        a, g = _NAMED_EXPONENTS[self.kind]
        return a, -1.0 - a - g, g

    @property
    def nu(self) -> float:
        return nu_eta(self)[0]

    @property
    def eta(self) -> float:
        return nu_eta(self)[1]

    @property
    def name(self) -> str:
        if self.kind is OrderingKind.VON_ROOS_SYMMETRIC:
            return f"vr:{self.alpha:g}"
        if self.kind is OrderingKind.VON_ROOS:
            return f"vr:{self.alpha:g},{self.gamma:g}"
        return self.kind.value

    @property
    def label(self) -> str:
        if self.kind is OrderingKind.VON_ROOS_SYMMETRIC:
            return f"vR(alpha={self.alpha:g})"
        if self.kind is OrderingKind.VON_ROOS:
            return f"vR(alpha={self.alpha:g}, gamma={self.gamma:g})"
        return _LABELS[self.kind]

    def canonical(self) -> OrderingSpec:
        """Map von Roos exponents that match a named ordering to that ordering.

        vR(0) is BD-D and vR(-1/2) is Z-K; a general pair with alpha = gamma
        becomes the symmetric form.  Other specs are returned as is.
        """
        if self.kind is OrderingKind.VON_ROOS:
            pair = (float(self.alpha), float(self.gamma))
            for kind, exps in _NAMED_EXPONENTS.items():
                if pair == exps:
                    return OrderingSpec(kind)
            if pair[0] == pair[1]:
                return OrderingSpec(OrderingKind.VON_ROOS_SYMMETRIC, pair[0]).canonical()
        if self.kind is OrderingKind.VON_ROOS_SYMMETRIC:
            if self.alpha == 0.0:
                return BDD
            if self.alpha == -0.5:
                return ZK
        return self

    def __str__(self) -> str:
        return self.name


BDD = OrderingSpec(OrderingKind.BDD)
ZK = OrderingSpec(OrderingKind.ZK)
LK = OrderingSpec(OrderingKind.LK)
GW = OrderingSpec(OrderingKind.GW)
TL = OrderingSpec(OrderingKind.TL)


def von_roos(alpha: float, gamma: float | None = None) -> OrderingSpec:
    """Symmetric von Roos ordering, or the general (alpha, gamma) pair."""
    if gamma is None or float(gamma) == float(alpha):
        return OrderingSpec(OrderingKind.VON_ROOS_SYMMETRIC, float(alpha))
    return OrderingSpec(OrderingKind.VON_ROOS, float(alpha), float(gamma)).canonical()


def parse_ordering(name: str | OrderingSpec) -> OrderingSpec:
    """Parse "bdd", "zk", "lk", "gw", "tl", "vr:<alpha>" or "vr:<alpha>,<gamma>"."""
    if isinstance(name, OrderingSpec):
        return name
    key = str(name).strip().lower()
    if key.startswith("vr:"):
        try:
            exps = [float(x) for x in key[3:].split(",")]
        except ValueError:
            raise InvalidParameterError(f"bad von Roos exponents in {name!r}") from None
        if len(exps) not in (1, 2):
            raise InvalidParameterError(f"expected vr:<alpha> or vr:<alpha>,<gamma>, got {name!r}")
        return von_roos(*exps)
    try:
        return OrderingSpec(OrderingKind(key))
    except ValueError:
        raise InvalidParameterError(
            f"unknown ordering {name!r}; expected bdd, zk, lk, gw, tl, vr:<alpha> or vr:<alpha>,<gamma>"
        ) from None


def nu_eta(ordering: OrderingSpec) -> tuple[float, float]:
    alpha, _, gamma = ordering.exponents
    return alpha + gamma, 2.0 * (alpha + gamma + alpha * gamma)


def _exact_nu_eta(ordering: OrderingSpec):
    # named orderings have rational exponents; keep them exact so derived
    # constants such as g are rounded only once
    if ordering.kind in (OrderingKind.VON_ROOS_SYMMETRIC, OrderingKind.VON_ROOS):
        return nu_eta(ordering)
    alpha, gamma = (Fraction(x).limit_denominator(12) for x in _NAMED_EXPONENTS[ordering.kind])
    return alpha + gamma, 2 * (alpha + gamma + alpha * gamma)


def can_match(ordering: OrderingSpec) -> bool:
    return ordering.kind in (
        OrderingKind.VON_ROOS_SYMMETRIC,
        OrderingKind.TL,
        OrderingKind.BDD,
        OrderingKind.ZK,
    )


def boundary_coeffs(ordering: OrderingSpec, m_left, m_right):
    """Junction coefficients (mu, rho) for a step from ``m_left`` to ``m_right``.

    Accepts scalars or arrays of positive masses.
    """
    if not can_match(ordering):
        raise UnsupportedMatchingError(
            f"no junction conditions are available for the {ordering.label} ordering"
        )
    ml = np.asarray(m_left, dtype=float)
    mr = np.asarray(m_right, dtype=float)
    if np.any(ml <= 0) or np.any(mr <= 0):
        raise InvalidParameterError("masses must be positive")
    kind = ordering.canonical().kind
    if kind is OrderingKind.BDD:
        mu, rho = np.ones_like(ml * mr), ml / mr
    elif kind is OrderingKind.ZK:
        mu = np.sqrt(ml / mr)
        rho = mu.copy()
    elif kind is OrderingKind.TL:
        mu = (2.0 * ml + mr) / (ml + 2.0 * mr)
        rho = (5.0 * ml + mr) / (ml + 5.0 * mr)
    else:
        # symmetric von Roos with beta = -1 - 2 alpha, so alpha + beta + 1 = -alpha
        a = float(ordering.alpha)
        mu = (mr ** (a + 1) * ml ** (-a) + ml) / (ml ** (a + 1) * mr ** (-a) + mr)
        rho = (ml ** (a + 1) * mr ** (-a) + ml) / (mr ** (a + 1) * ml ** (-a) + mr)
    if mu.ndim == 0:
        return float(mu), float(rho)
    return mu, rho


def step_reflection_factor(ordering: OrderingSpec, k_left, k_right, m_left, m_right):
    """Single-interface reflection factor r = (k_l mu - k_r rho) / (k_l mu + k_r rho)."""
    mu, rho = boundary_coeffs(ordering, m_left, m_right)
    a = np.asarray(k_left, dtype=complex) * mu
    b = np.asarray(k_right, dtype=complex) * rho
    den = a + b
    if np.any(den == 0):
        raise SingularInterfaceError("k_l*mu + k_r*rho vanishes; the interface factor is singular")
    r = (a - b) / den
    return complex(r) if r.ndim == 0 else r


class DHContext:
    """Marker base for the heterostructure context of :func:`g_parameter`."""


@dataclass(frozen=True)
class ExponentialDH(DHContext):
    pass


@dataclass(frozen=True)
class SingularDH(DHContext):
    A: float


def g_parameter(ordering: OrderingSpec, context: DHContext) -> float:
    """Inverse-square coupling g of the transformed constant-mass potential."""
    nu, eta = _exact_nu_eta(ordering)
    if isinstance(context, ExponentialDH):
        return float((3 + 8 * eta - 8 * nu) / 2)
    if isinstance(context, SingularDH):
        return float(2 * (2 + 2 * eta - nu)) + 2.0 * context.A
    raise InvalidParameterError(f"unknown heterostructure context {context!r}")


class IsotonicClass(enum.Enum):
    NON_ISOTONIC = "non-isotonic"
    ISOTONIC_NEGATIVE_G = "isotonic, -1/2 <= g < 0"
    ISOTONIC_NONNEGATIVE_G = "isotonic, g >= 0"


def classify_isotonic(g: float) -> IsotonicClass:
    if g < -0.5:
        return IsotonicClass.NON_ISOTONIC
    if g < 0:
        return IsotonicClass.ISOTONIC_NEGATIVE_G
    return IsotonicClass.ISOTONIC_NONNEGATIVE_G
