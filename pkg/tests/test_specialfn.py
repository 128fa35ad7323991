import cmath

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdm_spectra.errors import SpecialFunctionDomainError
from pdm_spectra.specialfn import (
    digamma,
    gamma,
    gauss_2f1,
    gauss_2f1_series,
    kummer_m,
    rgamma,
    tricomi_u,
    whittaker_m,
    whittaker_w,
)

mp.mp.dps = 30


def rel(a, b):
    return abs(complex(a) - complex(b)) / max(abs(complex(b)), 1e-300)


@pytest.mark.parametrize("z", [0.3, 1.0, 4.5, 17.2, -2.5, 0.5 + 2j, -3.3 + 0.7j])
def test_gamma_against_mpmath(z):
    assert rel(gamma(z), mp.gamma(z)) < 1e-13
    assert rel(rgamma(z), mp.rgamma(z)) < 1e-13
    assert rel(digamma(z), mp.digamma(z)) < 1e-12


def test_gamma_poles():
    with pytest.raises(SpecialFunctionDomainError):
        gamma(-2.0)
    assert rgamma(-3.0) == 0


KUMMER_CASES = [
    (0.5, 1.5, 0.7),
    (-2.3, 3.1, 5.0),
    (1.2, 0.4, 12.0),
    (0.25 + 0.5j, 1.5, 2.0),
    (-7.5, 2.5, 30.0),
    (3.0, 5.0, -8.0),
]


@pytest.mark.parametrize("a, b, y", KUMMER_CASES)
def test_kummer_against_mpmath(a, b, y):
    assert rel(kummer_m(a, b, y), mp.hyp1f1(a, b, y)) < 1e-11


U_CASES = [
    (0.5, 1.5, 0.7),
    (-2.3, 3.1, 5.0),
    (1.2, 0.4, 12.0),
    (2.7, 1.0, 3.0),
    (0.8, 2.0, 0.4),
    (-3.0, 1.7, 2.0),
    (4.2, 6.1, 40.0),
    (0.3, 1.3, 150.0),
]


@pytest.mark.parametrize("a, b, y", U_CASES)
def test_tricomi_against_mpmath(a, b, y):
    assert rel(tricomi_u(a, b, y), mp.hyperu(a, b, y)) < 1e-9


@pytest.mark.parametrize(
    "kappa, mu, y",
    [(0.3, 0.7, 1.2), (-1.5, 0.25, 4.0), (2.2, 1.9, 9.0), (0.0, 0.5, 0.3), (-4.37, 1.0, 6.0), (1.0, 2.5j, 2.0)],
)
def test_whittaker_against_mpmath(kappa, mu, y):
    assert rel(whittaker_m(kappa, mu, y), mp.whitm(kappa, mu, y)) < 1e-10
    assert rel(whittaker_w(kappa, mu, y), mp.whitw(kappa, mu, y)) < 1e-9


@pytest.mark.parametrize(
    "a, b, c, x",
    [
        (0.5, 1.5, 0.5, -0.3),
        (-5.75, 6.75, 0.5, -4.0),
        (0.5, 12.0, 0.5, -4.0),
        (-6.25 + 1j, 6.75 - 1j, 0.5, -3.0),
        (2.0, -3.0, 1.5, -10.0),
    ],
)
def test_gauss_against_mpmath(a, b, c, x):
    assert rel(gauss_2f1(a, b, c, x), mp.hyp2f1(a, b, c, x)) < 1e-11


def test_gauss_domain():
    with pytest.raises(SpecialFunctionDomainError):
        gauss_2f1(1.3, 2.2, 1.5, 0.4)
    assert rel(gauss_2f1_series(1.3, 2.2, 1.5, 0.4), mp.hyp2f1(1.3, 2.2, 1.5, 0.4)) < 1e-12


def test_symmetric_basis_parameters():
    # the even and odd solutions of the rational profile at E = -4.5 (sigma = 4)
    lam, k = 12.5, 4.0 * cmath.sqrt(-4.5 + 0j) / 2
    a, b = lam / 2 + 0.0 + k, lam / 2 - k
    for x in np.linspace(-4.0, -0.1, 7):
        # the even solution is small near its nodes; 1e-10 relative there
        assert rel(gauss_2f1(a, b, 0.5, x), mp.hyp2f1(a, b, 0.5, x)) < 1e-10
        assert rel(gauss_2f1(a + 0.5, b + 0.5, 1.5, x), mp.hyp2f1(a + 0.5, b + 0.5, 1.5, x)) < 1e-10


def test_array_argument():
    y = np.linspace(0.1, 3.0, 9)
    got = kummer_m(0.4, 1.3, y)
    ref = [complex(mp.hyp1f1(0.4, 1.3, v)) for v in y]
    np.testing.assert_allclose(got, ref, rtol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(-6.0, 6.0), st.floats(0.3, 6.0), st.floats(0.05, 10.0))
def test_kummer_transformation(a, b, y):
    # M(a, b, y) = e^y M(b - a, b, -y)
    lhs = kummer_m(a, b, y)
    rhs = np.exp(y) * kummer_m(b - a, b, -y)
    scale = abs(np.exp(y) * kummer_m(abs(b - a), b, y)) + abs(lhs)
    assert abs(lhs - rhs) <= 1e-10 * scale


@settings(max_examples=60, deadline=None)
@given(st.floats(-4.0, 4.0).filter(lambda a: abs(a) > 1e-3), st.floats(0.3, 5.0), st.floats(0.05, 20.0))
def test_kummer_contiguous_relation(a, b, y):
    # (b - a) M(a-1) + (2a - b + y) M(a) - a M(a+1) = 0
    m0, m1, m2 = kummer_m(a - 1, b, y), kummer_m(a, b, y), kummer_m(a + 1, b, y)
    terms = [(b - a) * m0, (2 * a - b + y) * m1, -a * m2]
    assert abs(sum(terms)) <= 1e-10 * max(sum(abs(t) for t in terms), 1e-300)


@settings(max_examples=60, deadline=None)
@given(st.floats(-3.0, 3.0), st.floats(-3.0, 3.0), st.floats(0.2, 3.0), st.floats(-0.95, 0.45))
def test_pfaff_consistency(a, b, c, x):
    # F(a, b; c; x) = (1 - x)^{-a} F(a, c - b; c; x / (x - 1)) inside the unit disk
    lhs = gauss_2f1_series(a, b, c, x)
    w = x / (x - 1.0)
    rhs = (1.0 - x) ** (-a) * gauss_2f1_series(a, c - b, c, w)
    ref = complex(mp.hyp2f1(a, b, c, x))
    tol = 1e-10 * max(1.0, abs(ref))
    assert abs(lhs - ref) < tol
    assert abs(rhs - ref) < tol


def test_gauss_first_order_near_zero():
    a, b, c = 1.7, -2.3, 0.5
    for x in (-1e-4, -1e-5, -1e-6):
        slope = (gauss_2f1(a, b, c, x) - 1.0) / x
        assert abs(slope - a * b / c) < abs(a * b / c) * 10 * abs(x) + 1e-6


def fd2(f, y, h):
    """Fourth-order central differences (f'', f')."""
    p1, m1, p2, m2, f0 = f(y + h), f(y - h), f(y + 2 * h), f(y - 2 * h), f(y)
    d2 = (-p2 + 16 * p1 - 30 * f0 + 16 * m1 - m2) / (12 * h * h)
    d1 = (-p2 + 8 * p1 - 8 * m1 + m2) / (12 * h)
    return d2, d1


@pytest.mark.parametrize("a, b", [(0.4, 1.3), (-2.5, 0.5), (1.2 + 0.3j, 2.0)])
def test_kummer_ode(a, b):
    # y M'' + (b - y) M' - a M = 0
    for y in np.linspace(0.5, 8.0, 30):
        h = 2e-3 * y
        d2, d1 = fd2(lambda t: kummer_m(a, b, t), y, h)
        m = kummer_m(a, b, y)
        terms = [y * d2, (b - y) * d1, -a * m]
        assert abs(sum(terms)) < 1e-6 * sum(abs(t) for t in terms)


@pytest.mark.parametrize("kappa, mu", [(0.3, 0.7), (-2.1, 1.25), (4.0, 0.5j)])
def test_whittaker_ode(kappa, mu):
    # W'' + (-1/4 + kappa / y + (1/4 - mu^2) / y^2) W = 0, same for M
    for fn in (whittaker_m, whittaker_w):
        for y in np.linspace(0.5, 12.0, 30):
            h = 2e-3 * y
            d2, _ = fd2(lambda t: fn(kappa, mu, t), y, h)
            w = fn(kappa, mu, y)
            q = -0.25 + kappa / y + (0.25 - mu * mu) / y**2
            assert abs(d2 + q * w) < 1e-6 * (abs(d2) + abs(q * w))


@pytest.mark.parametrize("a, b, c", [(0.5, 1.5, 0.5), (-5.75, 6.75, 0.5), (6.25 + 1j, 6.25 - 1j, 1.5)])
def test_gauss_ode(a, b, c):
    # x (1 - x) F'' + (c - (a + b + 1) x) F' - a b F = 0
    for x in np.linspace(-4.0, -0.05, 30):
        h = 2e-3 * max(abs(x), 0.1)
        d2, d1 = fd2(lambda t: gauss_2f1(a, b, c, t), x, h)
        f = gauss_2f1(a, b, c, x)
        terms = [x * (1 - x) * d2, (c - (a + b + 1) * x) * d1, -a * b * f]
        assert abs(sum(terms)) < 1e-6 * sum(abs(t) for t in terms)
