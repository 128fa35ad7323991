import math

import numpy as np
import pytest

from pdm_spectra.analytic import solve_transcendental
from pdm_spectra.closedform import (
    half_power_oscillator_estar,
    isotonic_levels,
    poschl_teller_count,
    poschl_teller_lambda,
    poschl_teller_levels,
    singular_a_bound,
    singular_levels,
)
from pdm_spectra.errors import (
    ConditionViolationError,
    InvalidParameterError,
    NoBoundStateError,
    NonIsotonicError,
)
from pdm_spectra.multistep import find_poles
from pdm_spectra.orderings import ExponentialDH, SingularDH, g_parameter, parse_ordering
from pdm_spectra.profiles import SingularParabolicMass, SymmetricRational, build_model, discretize

# closed-form rows of the symmetric rational table (sigma = 4, mu = 3)
PT_ROWS = {
    "bdd": (-8.25, -6.875, -5.625, -4.5, -3.5, -2.625, -1.875),
    "zk": (-8.3099, -6.9297, -5.6745, -4.54430, -3.539103, -2.65890, -1.90370),
    "tl": (-8.29167, -6.91667, -5.66667, -4.54167, -3.54167, -2.66667, -1.91667),
}


@pytest.mark.parametrize("ordering", sorted(PT_ROWS))
def test_poschl_teller_rows(ordering):
    got = [poschl_teller_levels(3.0, 4.0, ordering, n) for n in range(7)]
    np.testing.assert_allclose(got, PT_ROWS[ordering], rtol=0, atol=1e-5)


def test_poschl_teller_lambda_and_count():
    assert poschl_teller_lambda(3.0, 4.0, "bdd") == 12.5
    # n = 0 .. floor(lambda - 1)
    assert poschl_teller_count(3.0, 4.0, "bdd") == 12
    assert poschl_teller_levels(3.0, 4.0, "bdd", 11) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(InvalidParameterError):
        poschl_teller_levels(3.0, 4.0, "bdd", 12)


def test_poschl_teller_no_bound_state():
    # 2 eta - 4 nu = 4 alpha gamma < 0 needs exponents of opposite sign
    with pytest.raises(NoBoundStateError, match="complex"):
        poschl_teller_levels(0.5, 1.0, "vr:0.5,-0.5", 0)
    # real lambda <= 1 gives lambda (lambda - 1) <= 0
    with pytest.raises(NoBoundStateError):
        poschl_teller_levels(0.4, 1.0, "bdd", 0)


def test_poschl_teller_monotone():
    for o in ("bdd", "zk", "tl", "vr:-0.25"):
        E = [poschl_teller_levels(3.0, 4.0, o, n) for n in range(poschl_teller_count(3.0, 4.0, o))]
        assert np.all(np.diff(E) > 0)


def test_isotonic_levels():
    # BDD exponential: g = 3/2, d = 1, E = 2 sqrt(6) (n + 1)
    w = math.sqrt(6.0)
    for n in range(4):
        assert isotonic_levels(w, 1.5, n) == pytest.approx(2 * w * (n + 1), rel=1e-15)
    assert isotonic_levels(1.0, -0.5, 0) == 1.0
    with pytest.raises(NonIsotonicError) as err:
        isotonic_levels(1.0, -2.5, 0)
    assert err.value.condition == "g >= -1/2"
    with pytest.raises(InvalidParameterError):
        isotonic_levels(1.0, 1.0, -1)


def test_half_power_equals_isotonic():
    for g in (-0.5, -7 / 6 + 1.0, 0.0, 1.5, 4.0):
        for n in range(5):
            assert half_power_oscillator_estar(2.3, g, n) == isotonic_levels(2.3, g, n)


def test_isotonic_tl_is_not_isotonic():
    g = g_parameter(parse_ordering("tl"), ExponentialDH())
    with pytest.raises(NonIsotonicError):
        isotonic_levels(1.0, g, 0)


def test_singular_levels():
    assert singular_levels(2.0, -10.0, 1.0, "zk", 0) == pytest.approx(-16.0, abs=1e-13)
    d = math.sqrt(17.0) / 2.0
    assert singular_levels(2.0, -10.0, 1.0, "bdd", 0) == pytest.approx(-100.0 / (1.0 + d) ** 2, rel=1e-15)
    assert singular_levels(2.0, -10.0, 1.0, "bdd", 0) == pytest.approx(-10.6688, abs=5e-5)
    E = [singular_levels(2.0, -10.0, 1.0, "bdd", n) for n in range(20)]
    assert np.all(np.diff(E) > 0)


def test_singular_a_condition_named():
    assert singular_a_bound("bdd") == -1.25
    with pytest.raises(ConditionViolationError) as err:
        singular_levels(-2.0, -10.0, 1.0, "bdd", 0)
    assert err.value.condition == "A > -5/4 - (2 eta - nu)"
    assert "A > -5/4 - (2 eta - nu)" in str(err.value)


def test_singular_a_condition_implies_g_condition():
    # at the A bound g = 3/2, so g > -1/2 holds whenever A does
    for o in ("bdd", "zk", "lk", "gw", "tl"):
        bound = singular_a_bound(o)
        g = g_parameter(parse_ordering(o), SingularDH(bound))
        assert g == pytest.approx(1.5, abs=1e-14)


def test_symmetric_limit_approaches_poschl_teller():
    pt = np.array([poschl_teller_levels(3.0, 4.0, "bdd", n) for n in range(7)])
    errs = []
    for L in (2.0, 3.0, 4.0, 6.0, 8.0):
        model = build_model(SymmetricRational(3.0, 4.0), -L, L)
        E = find_poles(discretize(model, int(1000 * L)), "bdd", -8.6, model.threshold, points=1500).energies
        errs.append(np.max(np.abs(E[:7] - pt)))
    # decreasing until the discretization error of the grid takes over
    assert np.all(np.diff(errs) < 1e-9)
    assert errs[0] > errs[1] > errs[2] > errs[3]
    assert errs[-1] < 1e-3


def test_singular_limit_gap_shrinks():
    ref = np.array([singular_levels(2.0, -10.0, 1.0, "zk", n) for n in range(3)])
    gaps = []
    for z0, z1 in ((0.1, 4.0), (0.05, 8.0)):
        model = build_model(SingularParabolicMass(2.0, -10.0, 1.0), z0, z1)
        E = solve_transcendental(model, "zk", -17.0, -2.2, points=400).energies
        gaps.append(np.abs(E[:3] - ref))
    assert np.all(gaps[1] < gaps[0])
