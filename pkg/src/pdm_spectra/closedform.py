"""Closed-form reference spectra and their validity conditions."""

from __future__ import annotations

import math

from .errors import (
    ConditionViolationError,
    InvalidParameterError,
    NoBoundStateError,
    NonIsotonicError,
)
from .orderings import SingularDH, g_parameter, nu_eta, parse_ordering

__all__ = [
    "poschl_teller_lambda",
    "poschl_teller_levels",
    "poschl_teller_count",
    "isotonic_levels",
    "singular_levels",
    "singular_a_bound",
    "half_power_oscillator_estar",
]


def _level_index(n):
    if int(n) != n or n < 0:
        raise InvalidParameterError(f"level index must be a non-negative integer, got {n!r}")
    return int(n)


def poschl_teller_lambda(mu: float, sigma: float, ordering) -> float:
    """lambda = 1/2 + sqrt(mu^2 sigma^2 + 2 eta - 4 nu) of the rational profiles."""
    nu, eta = nu_eta(parse_ordering(ordering))
    s2 = mu * mu * sigma * sigma + 2.0 * eta - 4.0 * nu
    if s2 < 0:
        raise NoBoundStateError(
            f"mu^2 sigma^2 + 2 eta - 4 nu = {s2:.9g} < 0: lambda is complex and no level exists"
        )
    lam = 0.5 + math.sqrt(s2)
    if lam * (lam - 1.0) <= 0:
        raise NoBoundStateError(f"lambda (lambda - 1) = {lam * (lam - 1.0):.9g} <= 0: no bound state")
    return lam


def poschl_teller_count(mu: float, sigma: float, ordering) -> int:
    """Number of admissible levels n = 0, 1, ..., n <= lambda - 1."""
    lam = poschl_teller_lambda(mu, sigma, ordering)
    return int(math.floor(lam - 1.0)) + 1


def poschl_teller_levels(mu: float, sigma: float, ordering, n: int) -> float:
    """E_n = -(n - lambda + 1)^2 / sigma^2 + (1/4 + 2 eta - 3 nu) / sigma^2."""
    n = _level_index(n)
    ordering = parse_ordering(ordering)
    lam = poschl_teller_lambda(mu, sigma, ordering)
    if n > lam - 1.0:
        raise InvalidParameterError(f"level n={n} exceeds lambda - 1 = {lam - 1.0:.9g}")
    nu, eta = nu_eta(ordering)
    s2 = sigma * sigma
    return -((n - lam + 1.0) ** 2) / s2 + (0.25 + 2.0 * eta - 3.0 * nu) / s2


def _isotonic_d(g):
    if g < -0.5:
        raise NonIsotonicError("g >= -1/2", f"g = {g:.9g} < -1/2: the spectrum is not isotonic")
    return 0.5 * math.sqrt(1.0 + 2.0 * g)


def isotonic_levels(omega: float, g: float, n: int) -> float:
    """E = omega (2n + 1 + d), d = sqrt(1 + 2g) / 2, for g >= -1/2."""
    n = _level_index(n)
    if not omega > 0:
        raise InvalidParameterError("omega must be positive")
    return omega * (2.0 * n + 1.0 + _isotonic_d(g))


def half_power_oscillator_estar(omega: float, g: float, n: int) -> float:
    """E* = omega (2n + 1 + sqrt(1 + 2g) / 2) of the half-power transformed oscillator."""
    n = _level_index(n)
    if not omega > 0:
        raise InvalidParameterError("omega must be positive")
    return omega * (2.0 * n + 1.0 + _isotonic_d(g))


def singular_a_bound(ordering) -> float:
    """Lower bound -5/4 - (2 eta - nu) that A must exceed."""
    nu, eta = nu_eta(parse_ordering(ordering))
    return -1.25 - (2.0 * eta - nu)


def singular_levels(A: float, B: float, c: float, ordering, n: int) -> float:
    """E = -(AB)^2 / (4c (2n + 1 + sqrt(1 + 2g) / 2)^2), g = 2(2 + 2 eta - nu) + 2A."""
    n = _level_index(n)
    ordering = parse_ordering(ordering)
    if not c > 0:
        raise InvalidParameterError("c must be positive")
    bound = singular_a_bound(ordering)
    if not A > bound:
        raise ConditionViolationError(
            "A > -5/4 - (2 eta - nu)",
            f"A = {A:.9g} violates A > -5/4 - (2 eta - nu) = {bound:.9g}",
        )
    g = g_parameter(ordering, SingularDH(A))
    if not g > -0.5:
        raise ConditionViolationError("g > -1/2", f"g = {g:.9g} violates g > -1/2")
    d = 0.5 * math.sqrt(1.0 + 2.0 * g)
    return -((A * B) ** 2) / (4.0 * c * (2.0 * n + 1.0 + d) ** 2)
