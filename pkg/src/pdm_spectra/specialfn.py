"""Confluent and Gauss hypergeometric functions for the inner-region bases.

Parameters are complex scalars; the argument may be a scalar or an array.

Tricomi U is evaluated by whichever representation is accurate at the given
argument:

* a polynomial when a is a non-positive integer,
* quadrature of the integral representation for real y >= 0.8 (generalized
  Gauss-Laguerre for real parameters, adaptive otherwise), shifted to
  Re a > 1/2 with the stable downward recurrence in a,
* the large-|y| asymptotic series when its error estimate is small,
* the logarithmic series for integer b,
* the connection formula through Kummer M otherwise.

The connection formula alone loses roughly y / ln(10) digits to cancellation
and is therefore only used where nothing better applies.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import roots_genlaguerre

from .errors import ConvergenceError, InvalidParameterError, SpecialFunctionDomainError

__all__ = [
    "SeriesControl",
    "gamma",
    "rgamma",
    "digamma",
    "kummer_m",
    "tricomi_u",
    "whittaker_m",
    "whittaker_w",
    "gauss_2f1",
    "gauss_2f1_series",
]


@dataclass(frozen=True)
class SeriesControl:
    rel_tol: float = 1e-13
    max_terms: int = 100_000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise InvalidParameterError("rel_tol must be positive")
        if self.max_terms < 1:
            raise InvalidParameterError("max_terms must be at least 1")


DEFAULT_CONTROL = SeriesControl()

# Lanczos approximation, g = 7, 9 coefficients
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_INT_TOL = 1e-12
_B_INT_TOL = 1e-9
_LAGUERRE_NODES = 120
_LAGUERRE_MIN_Y = 0.8


def _nonpositive_integer(z, tol=_INT_TOL):
    z = complex(z)
    n = round(z.real)
    return abs(z.imag) <= tol and abs(z.real - n) <= tol * max(1.0, abs(z.real)) and n <= 0


def gamma(z):
    """Complex Gamma function (Lanczos, reflection for Re z < 1/2)."""
    z = complex(z)
    if _nonpositive_integer(z, 0.0):
        raise SpecialFunctionDomainError(f"Gamma has a pole at {z.real:g}")
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * gamma(1.0 - z))
    z -= 1.0
    x = _LANCZOS[0]
    for i, c in enumerate(_LANCZOS[1:], start=1):
        x += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * x


def rgamma(z):
    """1 / Gamma(z), zero at the poles."""
    if _nonpositive_integer(z, 0.0):
        return 0j
    return 1.0 / gamma(z)


_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510)


def digamma(z):
    """Complex digamma function."""
    z = complex(z)
    if _nonpositive_integer(z, 0.0):
        raise SpecialFunctionDomainError(f"digamma has a pole at {z.real:g}")
    if z.real < 0.5:
        return digamma(1.0 - z) - math.pi / cmath.tan(math.pi * z)
    acc = 0j
    while abs(z) < 15.0:
        acc -= 1.0 / z
        z += 1.0
    s = cmath.log(z) - 0.5 / z
    z2 = z * z
    zp = z2
    for k, b in enumerate(_BERNOULLI, start=1):
        s -= b / (2 * k * zp)
        zp *= z2
    return s + acc


def _as_array(y):
    arr = np.asarray(y)
    return np.atleast_1d(arr.astype(complex)), arr.ndim == 0


def _finish(values, scalar):
    return complex(values[0]) if scalar else values


def _ratio(num, den, k):
    r = 1.0 / (k + 1.0)
    for p in num:
        r *= p + k
    for q in den:
        r /= q + k
    return r


def _sum_series(num, den, y, control, what, with_abs=False):
    """Sum the hypergeometric series with parameters ``num`` over ``den``.

    Terms follow t_0 = 1, t_{k+1} = t_k * prod(num + k) / (prod(den + k) (k + 1)) * y,
    vectorized in y.  With ``with_abs`` the sum of |t_k| is returned as well,
    a measure of the cancellation in the result.
    """
    if y.size <= 8:
        parts = [_sum_scalar(num, den, complex(v), control, what) for v in y.flat]
        total = np.array([p[0] for p in parts], dtype=complex).reshape(y.shape)
        mags = np.array([p[1] for p in parts]).reshape(y.shape)
        return (total, mags) if with_abs else total
    total = np.ones(y.shape, dtype=complex)
    term = total.copy()
    mags = np.abs(total)
    small_before = np.zeros(y.shape, dtype=bool)
    for k in range(control.max_terms):
        term = term * _ratio(num, den, k) * y
        total = total + term
        mags = mags + np.abs(term)
        small = np.abs(term) <= control.rel_tol * np.abs(total)
        if np.all((small & small_before) | (term == 0)):
            return (total, mags) if with_abs else total
        small_before = small
    raise ConvergenceError(
        f"{what} series did not converge in {control.max_terms} terms",
        total,
        float(np.max(np.abs(term))),
    )


def _sum_scalar(num, den, y, control, what):
    # plain complex arithmetic: numpy overhead dominates for a few arguments
    total = term = 1.0 + 0j
    mags = 1.0
    small_before = False
    tol = control.rel_tol
    two = len(num) == 2
    a, b, c = num[0], num[-1], den[0]
    for k in range(control.max_terms):
        if two:
            term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * y
        else:
            term *= (a + k) / ((c + k) * (k + 1.0)) * y
        total += term
        t = abs(term)
        mags += t
        small = t <= tol * abs(total)
        if (small and small_before) or term == 0:
            return total, mags
        small_before = small
    raise ConvergenceError(f"{what} series did not converge in {control.max_terms} terms", total, abs(term))


def _kummer_series(a, b, y, control):
    return _sum_series((a,), (b,), y, control, "Kummer M")


def kummer_m(a, b, y, control: SeriesControl = DEFAULT_CONTROL):
    """Kummer's function M(a, b; y) = 1F1(a; b; y).

    For Re y < -5 the Kummer transformation e^y M(b - a, b; -y) is summed
    instead to avoid cancellation.
    """
    a, b = complex(a), complex(b)
    if _nonpositive_integer(b, 0.0):
        raise SpecialFunctionDomainError(f"M(a, b; y) is undefined for b = {b.real:g}")
    yy, scalar = _as_array(y)
    out = np.empty_like(yy)
    neg = yy.real < -5.0
    if np.any(~neg):
        out[~neg] = _kummer_series(a, b, yy[~neg], control)
    if np.any(neg):
        out[neg] = np.exp(yy[neg]) * _kummer_series(b - a, b, -yy[neg], control)
    return _finish(out, scalar)


def _u_polynomial(n, b, y):
    # U(-n, b, y) = (-1)^n sum_k C(n, k) (b + k)_{n-k} (-y)^k
    total = np.zeros_like(y)
    for k in range(n + 1):
        p = 1.0 + 0j
        for j in range(n - k):
            p *= b + k + j
        total = total + math.comb(n, k) * p * (-y) ** k
    return (-1.0) ** n * total


@lru_cache(maxsize=256)
def _laguerre(alpha):
    x, w = roots_genlaguerre(_LAGUERRE_NODES, alpha)
    return x, w


def _u_laguerre_direct(a, b, y):
    """U for Re a > 1/2 and real y > 0 by generalized Gauss-Laguerre quadrature.

    U = y^{-a} / Gamma(a) int_0^inf e^{-s} s^{a-1} (1 + s/y)^{b-a-1} ds.  With
    c = a + 1 - b > 0 the variable is rescaled by lam = 1 + c / y so that the
    remaining integrand exp(c u) (1 + u)^{-c}, u = t / (y + c), stays smooth
    when c is large compared with y.
    """
    c = a + 1.0 - b
    lam = 1.0 + max(c.real, 0.0) / y
    x, w = _laguerre(a.real - 1.0)
    t = x[None, :]
    s = t / lam[:, None]
    f = np.exp(t * (1.0 - 1.0 / lam[:, None])) * (1.0 + s / y[:, None]) ** (-c)
    return y ** (-a) * lam ** (-a) * rgamma(a) * (f @ w)


def _u_quad_direct(a, b, y):
    """U for complex a with Re a > 1/2 and real y > 0 by adaptive quadrature.

    The substitution s = v^p, p = 1 / Re a, removes the endpoint singularity of
    s^{a-1}; what is left is bounded and slowly oscillating near v = 0.
    """
    p = 1.0 / a.real
    out = np.empty(y.shape, dtype=complex)
    for i, yi in enumerate(y):
        def f(v, part):
            s = v**p
            val = p * v ** (1j * a.imag * p) * np.exp(-s) * (1.0 + s / yi) ** (b - a - 1.0)
            return val.real if part == 0 else val.imag

        # QUADPACK flags roundoff at this tolerance; accuracy is checked against mpmath in the tests
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            re = quad(f, 0.0, np.inf, args=(0,), epsabs=0.0, epsrel=1e-13, limit=400)[0]
            im = quad(f, 0.0, np.inf, args=(1,), epsabs=0.0, epsrel=1e-13, limit=400)[0]
        out[i] = yi ** (-a) * rgamma(a) * complex(re, im)
    return out


def _u_laguerre(a, b, y):
    """U for real y >= 0.8; the downward recurrence in a covers Re a <= 1/2.

    Real parameters use Gauss-Laguerre quadrature, complex ones adaptive
    quadrature.
    """
    direct = _u_laguerre_direct if a.imag == 0 and b.imag == 0 else _u_quad_direct
    if a.real > 0.5:
        return direct(a, b, y)
    n = int(math.ceil(0.5 - a.real)) + 1
    top = a + n
    cur = direct(top, b, y)
    up = direct(top + 1.0, b, y)
    aa = top
    # U(a-1) = (2a - b + y) U(a) - a (a - b + 1) U(a+1)
    for _ in range(n):
        cur, up = (2.0 * aa - b + y) * cur - aa * (aa - b + 1.0) * up, cur
        aa -= 1.0
    return cur


def _u_asymptotic(a, b, y, max_terms=200):
    """Asymptotic series with optimal truncation; returns (value, error estimate)."""
    total = np.ones_like(y)
    term = np.ones_like(y)
    best_err = np.full(y.shape, np.inf)
    best = total.copy()
    done = np.zeros(y.shape, dtype=bool)
    for k in range(max_terms):
        term = term * (a + k) * (a - b + 1.0 + k) / ((k + 1.0) * (-y))
        mag = np.abs(term)
        growing = mag >= best_err
        done |= growing
        upd = ~done
        total = np.where(upd, total + term, total)
        best = np.where(upd, total, best)
        best_err = np.where(upd, mag, best_err)
        if np.all(done | (mag == 0)):
            break
    scale = y ** (-a)
    return best * scale, best_err * np.abs(scale)


def _u_connection(a, b, y, control):
    t1 = gamma(1.0 - b) * rgamma(a + 1.0 - b)
    t2 = gamma(b - 1.0) * rgamma(a)
    out = np.zeros_like(y)
    if t1 != 0:
        out = out + t1 * _kummer_series(a, b, y, control)
    if t2 != 0:
        out = out + t2 * y ** (1.0 - b) * _kummer_series(a + 1.0 - b, 2.0 - b, y, control)
    return out


def _u_log(a, n1, y, control):
    """U(a, n + 1, y) for integer n + 1 >= 1 by the logarithmic series."""
    n = n1 - 1
    out = np.zeros_like(y)
    g = rgamma(a - n)
    if g != 0:
        pref = (-1.0) ** (n + 1) / math.factorial(n) * g
        lny = np.log(y)
        psi_a = digamma(a)
        psi_1 = digamma(1.0)
        psi_n = digamma(n + 1.0)
        coef = 1.0 + 0j
        total = coef * (lny + psi_a - psi_1 - psi_n)
        zk = np.ones_like(y)
        k = 0
        small_before = False
        while True:
            coef *= (a + k) / ((n + 1.0 + k) * (k + 1.0))
            psi_a += 1.0 / (a + k)
            psi_1 += 1.0 / (k + 1.0)
            psi_n += 1.0 / (n + 1.0 + k)
            k += 1
            zk = zk * y
            term = coef * zk * (lny + psi_a - psi_1 - psi_n)
            total = total + term
            small = np.all(np.abs(term) <= control.rel_tol * np.abs(total))
            if (small and small_before) or np.all(term == 0):
                break
            small_before = small
            if k >= control.max_terms:
                raise ConvergenceError(
                    "logarithmic U series did not converge", total, float(np.max(np.abs(term)))
                )
        out = out + pref * total
    if n >= 1:
        ga = rgamma(a)
        if ga != 0:
            fin = np.zeros_like(y)
            for k in range(1, n + 1):
                p = 1.0 + 0j
                for j in range(n - k):
                    p *= 1.0 - a + k + j
                fin = fin + math.factorial(k - 1) * p / math.factorial(n - k) * y ** (-k)
            out = out + ga * fin
    return out


def _u_integer_b(a, nb, y, control):
    if nb >= 1:
        return _u_log(a, nb, y, control)
    # U(a, b, y) = y^{1-b} U(a - b + 1, 2 - b, y)
    return y ** (1 - nb) * _u_log(a - nb + 1.0, 2 - nb, y, control)


def tricomi_u(a, b, y, control: SeriesControl = DEFAULT_CONTROL):
    """Tricomi's confluent hypergeometric function U(a, b; y), y != 0."""
    a, b = complex(a), complex(b)
    yy, scalar = _as_array(y)
    if np.any(yy == 0):
        raise SpecialFunctionDomainError("U(a, b; y) is undefined at y = 0")
    if _nonpositive_integer(a):
        return _finish(_u_polynomial(-round(a.real), b, yy), scalar)

    out = np.empty_like(yy)
    todo = np.ones(yy.shape, dtype=bool)

    lag = (yy.imag == 0) & (yy.real >= _LAGUERRE_MIN_Y)
    if np.any(lag):
        out[lag] = _u_laguerre(a, b, yy[lag].real)
        todo &= ~lag
    if np.any(todo):
        val, err = _u_asymptotic(a, b, yy[todo])
        good = err <= 1e-14 * np.abs(val)
        idx = np.flatnonzero(todo)
        out[idx[good]] = val[good]
        todo[idx[good]] = False
    if np.any(todo):
        nb = round(b.real)
        if abs(b.imag) <= _B_INT_TOL and abs(b.real - nb) <= _B_INT_TOL:
            out[todo] = _u_integer_b(a, nb, yy[todo], control)
        else:
            out[todo] = _u_connection(a, b, yy[todo], control)
    return _finish(out, scalar)


def whittaker_m(kappa, mu, y, control: SeriesControl = DEFAULT_CONTROL):
    """M_{kappa,mu}(y) = e^{-y/2} y^{mu+1/2} M(mu - kappa + 1/2, 1 + 2 mu; y)."""
    kappa, mu = complex(kappa), complex(mu)
    yy, scalar = _as_array(y)
    m = np.atleast_1d(kummer_m(mu - kappa + 0.5, 1.0 + 2.0 * mu, yy, control))
    return _finish(np.exp(-yy / 2.0) * yy ** (mu + 0.5) * m, scalar)


def whittaker_w(kappa, mu, y, control: SeriesControl = DEFAULT_CONTROL):
    """W_{kappa,mu}(y) = e^{-y/2} y^{mu+1/2} U(mu - kappa + 1/2, 1 + 2 mu; y)."""
    kappa, mu = complex(kappa), complex(mu)
    yy, scalar = _as_array(y)
    u = np.atleast_1d(tricomi_u(mu - kappa + 0.5, 1.0 + 2.0 * mu, yy, control))
    return _finish(np.exp(-yy / 2.0) * yy ** (mu + 0.5) * u, scalar)


def gauss_2f1_series(a, b, c, x, control: SeriesControl = DEFAULT_CONTROL):
    """Defining power series of 2F1(a, b; c; x) for |x| < 1."""
    a, b, c = complex(a), complex(b), complex(c)
    if _nonpositive_integer(c, 0.0):
        raise SpecialFunctionDomainError(f"2F1 is undefined for c = {c.real:g}")
    xx, scalar = _as_array(x)
    if np.any(np.abs(xx) >= 1):
        raise SpecialFunctionDomainError("the 2F1 series needs |x| < 1")
    val = _sum_series((a, b), (c,), xx, control, "2F1")
    return _finish(val, scalar)


def gauss_2f1(a, b, c, x, control: SeriesControl = DEFAULT_CONTROL):
    """2F1(a, b; c; x) for real x <= 0.

    The series is summed directly for -1/2 <= x <= 0; below that the Pfaff
    transformation (1 - x)^{-a} 2F1(a, c - b; c; x / (x - 1)) is used, with a
    and b exchanged when that variant cancels less.
    """
    a, b, c = complex(a), complex(b), complex(c)
    xr = np.asarray(x, dtype=float)
    scalar = xr.ndim == 0
    xr = np.atleast_1d(xr)
    if np.any(xr > 0):
        raise SpecialFunctionDomainError("gauss_2f1 is implemented for x <= 0 only")
    out = np.empty(xr.shape, dtype=complex)
    near = xr >= -0.5
    if np.any(near):
        out[near] = gauss_2f1_series(a, b, c, xr[near], control)
    if np.any(~near):
        xf = xr[~near]
        out[~near] = _pfaff(a, b, c, xf, control)
    return _finish(out, scalar)


def _pfaff_series(a, b, c, w, control):
    if _nonpositive_integer(c, 0.0):
        raise SpecialFunctionDomainError(f"2F1 is undefined for c = {c.real:g}")
    return _sum_series((a, b), (c,), w.astype(complex), control, "2F1", True)


def _pfaff(a, b, c, x, control):
    # 2F1 is symmetric in a, b, so either parameter may be the one moved to
    # c - b; keep whichever variant cancels less
    w = x / (x - 1.0)
    s1, m1 = _pfaff_series(a, c - b, c, w, control)
    if a == b or np.all(m1 <= 1e3 * np.abs(s1)):
        return (1.0 - x) ** (-a) * s1
    s2, m2 = _pfaff_series(b, c - a, c, w, control)
    first = m1 * np.abs(s2) <= m2 * np.abs(s1)
    return np.where(first, (1.0 - x) ** (-a) * s1, (1.0 - x) ** (-b) * s2)
