import math

import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from pdm_spectra.analytic import (
    BasisFamily,
    basis_family,
    det_x,
    inner_basis,
    matching_matrix,
    root_function,
    solve_transcendental,
    transform_half_power,
    transform_quarter_power,
    wavefunction,
)
from pdm_spectra.closedform import poschl_teller_lambda
from pdm_spectra.errors import (
    ConditionViolationError,
    InvalidParameterError,
    NumericalInconsistencyError,
    UnsupportedAnalyticError,
)
from pdm_spectra.multistep import find_poles
from pdm_spectra.orderings import nu_eta, parse_ordering
from pdm_spectra.profiles import (
    Exponential,
    GaussianMass,
    MorseLike,
    SingularParabolicMass,
    SymmetricRational,
    build_model,
    discretize,
)

MODELS = {
    "symmetric": (build_model(SymmetricRational(3.0, 4.0), -2.0, 2.0), (-8.7, -7.1, -5.0, -3.3, -2.2)),
    "morse": (build_model(MorseLike(10.0, 2.0, 2.0), -0.8, 0.8), (-9.5, -8.0, -6.3, -4.9, -3.8)),
    "exponential": (build_model(Exponential(3.0, 0.5, 1.0), -2.0, 2.0), (1.0, 4.4, 9.0, 13.7, 21.0)),
    "singular": (build_model(SingularParabolicMass(2.0, -10.0, 1.0), 0.1, 4.0), (-15.0, -10.0, -5.0, -3.0, -1.7)),
}
T1_BDD = np.array([-8.25, -6.875, -5.625, -4.50009, -3.5013, -2.63724, -1.96428])


def fd(f, z, h):
    p1, m1, p2, m2, f0 = f(z + h), f(z - h), f(z + 2 * h), f(z - 2 * h), f(z)
    return (-p2 + 8 * p1 - 8 * m1 + m2) / (12 * h), (-p2 + 16 * p1 - 30 * f0 + 16 * m1 - m2) / (12 * h * h)


@pytest.mark.parametrize("name", sorted(MODELS))
@pytest.mark.parametrize("ordering", ["bdd", "zk", "tl"])
def test_basis_solves_inner_equation(name, ordering):
    model, energies = MODELS[name]
    try:
        basis = inner_basis(None, model, ordering)
    except ConditionViolationError:
        pytest.skip("inner well condition fails for this ordering")
    nu, eta = nu_eta(parse_ordering(ordering))
    width = model.z1 - model.z0
    z = np.linspace(model.z0 + 0.02 * width, model.z1 - 0.02 * width, 30)
    h = 2e-3 * width
    m = model.inner_mass
    dm, d2m = fd(m, z, h)
    for E in energies:
        for psi in (basis.psi1, basis.psi2):
            p = psi(z, E)
            dp, d2p = fd(lambda s: psi(s, E), z, h)
            terms = [
                -d2p / m(z),
                dm * dp / m(z) ** 2,
                -0.5 * (nu * d2m / m(z) ** 2 - eta * dm**2 / m(z) ** 3) * p,
                (model.inner_potential(z) - E) * p,
            ]
            res = np.abs(sum(terms)) / sum(np.abs(t) for t in terms)
            assert np.max(res) < 1e-5


@pytest.mark.parametrize("name", sorted(MODELS))
def test_normalized_wronskian_is_constant_and_nonzero(name):
    model, energies = MODELS[name]
    basis = inner_basis(None, model, "bdd")
    z = np.linspace(model.z0, model.z1, 9)
    for E in energies:
        w = basis.weight(E) * basis.wronskian(z, E)
        # psi1 psi2' - psi2 psi1' = C m(z) for the inner operator
        ratio = w / model.inner_mass(z)
        assert np.all(np.abs(ratio) > 0)
        # the Wronskian is a difference of products; deep below the basis
        # degeneracy psi1 and psi2 grow alike and the difference cancels
        p1, p2 = basis.psi1(z, E), basis.psi2(z, E)
        d1, d2 = basis.dpsi1(z, E), basis.dpsi2(z, E)
        cancel = (np.abs(p1 * d2) + np.abs(p2 * d1)) / np.abs(basis.wronskian(z, E))
        tol = 1e-6 + 1e-10 * cancel.max()
        assert np.max(np.abs(ratio - ratio[0])) < tol * abs(ratio[0])


def test_basis_family_detection():
    assert basis_family(MODELS["morse"][0]) is BasisFamily.MORSE
    with pytest.raises(UnsupportedAnalyticError):
        basis_family(build_model(GaussianMass(3.0, 4.0), -2.0, 2.0))


def test_singular_condition_f():
    # ZK: F = (5 - 12 + 4 + 4A) / 16 <= 0 for A <= 3/4
    model = build_model(SingularParabolicMass(0.5, -10.0, 1.0), 0.1, 4.0)
    with pytest.raises(ConditionViolationError) as err:
        inner_basis(None, model, "zk")
    assert err.value.condition == "F > 0"


def bdd_full_system(model, basis, E):
    """4 x 4 matching matrix for (R e^{eta0 z0}, P, Q, T e^{-eta2 z1}) under BDD."""
    eta0 = math.sqrt(model.m0 * (model.V0 - E))
    eta2 = math.sqrt(model.m2 * (model.V2 - E))
    w = basis.weight(E)
    z0, z1, m = model.z0, model.z1, model.inner_mass
    p1 = [basis.psi1(np.array([z]), E)[0] for z in (z0, z1)]
    p2 = [w * basis.psi2(np.array([z]), E)[0] for z in (z0, z1)]
    d1 = [basis.dpsi1(np.array([z]), E)[0] for z in (z0, z1)]
    d2 = [w * basis.dpsi2(np.array([z]), E)[0] for z in (z0, z1)]
    M = np.array(
        [
            [1.0, -p1[0], -p2[0], 0.0],
            [eta0 / model.m0, -d1[0] / m(z0), -d2[0] / m(z0), 0.0],
            [0.0, p1[1], p2[1], -1.0],
            [0.0, d1[1] / m(z1), d2[1] / m(z1), eta2 / model.m2],
        ],
        dtype=complex,
    )
    M /= np.max(np.abs(M), axis=1, keepdims=True)
    M /= np.max(np.abs(M), axis=0, keepdims=True)
    return M


@pytest.mark.parametrize("name", ["symmetric", "morse", "singular"])
def test_roots_match_full_bdd_system(name):
    model, energies = MODELS[name]
    basis = inner_basis(None, model, "bdd")
    roots = solve_transcendental(model, "bdd", min(energies), model.threshold, points=600).energies
    assert roots.size >= 3

    def det4(E):
        return np.linalg.det(bdd_full_system(model, basis, E)).real

    for r in roots:
        # narrow bracket: the Morse weight has a pole 1.3e-4 above its second level
        h = 1e-6 * max(1.0, abs(r))
        oracle = brentq(det4, r - h, r + h, xtol=1e-13)
        assert abs(oracle - r) < 1e-8


def fd_eigenvalues(model, lo, hi, pad=15.0, h=4e-3):
    """BDD levels by a dense three-point discretization of -(psi'/m)' + V psi on a box."""
    z = np.arange(model.z0 - pad, model.z1 + pad + h / 2, h)
    V, m = model.eval(z)
    zh = 0.5 * (z[1:] + z[:-1])
    _, mh = model.eval(zh)
    inv = 1.0 / mh
    diag = (np.concatenate([inv, [0.0]]) + np.concatenate([[0.0], inv])) / h**2 + V
    off = -inv / h**2
    return eigh_tridiagonal(diag[1:-1], off[1:-1], select="v", select_range=(lo, hi), eigvals_only=True)


def test_independent_eigensolver_symmetric_bdd():
    model = MODELS["symmetric"][0]
    oracle = fd_eigenvalues(model, -9.0, model.threshold - 1e-3)
    E = solve_transcendental(model, "bdd", -9.0, model.threshold, points=600).energies
    assert oracle.size == E.size == 7
    np.testing.assert_allclose(E, oracle, rtol=0, atol=1e-2)
    np.testing.assert_allclose(E, T1_BDD, rtol=0, atol=1e-3)


def test_independent_eigensolver_morse_bdd():
    model = MODELS["morse"][0]
    oracle = fd_eigenvalues(model, -9.9, model.threshold - 1e-3, pad=10.0, h=1e-3)
    E = solve_transcendental(model, "bdd", -9.9, model.threshold, points=600).energies
    np.testing.assert_allclose(E, oracle, rtol=0, atol=1e-2)


def test_root_function_alternates_between_levels():
    model = MODELS["morse"][0]
    levels = solve_transcendental(model, "zk", -9.9, model.threshold, points=600).energies
    for a, b in zip(levels[:-1], levels[1:]):
        E = np.linspace(a, b, 42)[1:-1]
        g = np.array([root_function(model, "zk", e) for e in E])
        assert np.all(np.sign(g) == np.sign(g[0]))
    mids = 0.5 * (levels[:-1] + levels[1:])
    s = np.sign([root_function(model, "zk", e) for e in mids])
    assert np.all(s[1:] == -s[:-1])


def test_det_x_real_and_zero_at_root():
    model = MODELS["morse"][0]
    X = matching_matrix(model, "zk", -8.08993344)
    assert abs(det_x(model, "zk", -8.08993344)) < 1e-6 * X.scale
    assert abs(det_x(model, "zk", -7.0)) > 1e-3 * matching_matrix(model, "zk", -7.0).scale


def test_methods_agree_morse():
    model = MODELS["morse"][0]
    for o in ("bdd", "zk"):
        a = solve_transcendental(model, o, -9.9, model.threshold, points=600).energies
        b = find_poles(discretize(model, 4000), o, -9.9, model.threshold).energies
        assert a.size == b.size == 3
        assert np.max(np.abs(a - b)) < 1e-3


def test_wavefunction_bdd_symmetric():
    model = MODELS["symmetric"][0]
    levels = solve_transcendental(model, "bdd", -8.6, model.threshold, points=600).energies
    z = np.linspace(-6.0, 6.0, 4001)
    for k, E in enumerate(levels):
        psi = wavefunction(model, "bdd", E)
        v = psi(z).real
        assert np.count_nonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0) == k
        assert psi.residual < 1e-6
        # continuity of psi and psi'/m at both junctions
        for zj, m_out in ((model.z0, model.m0), (model.z1, model.m2)):
            h = 1e-6
            inside = psi.inner(np.array([zj + (h if zj == model.z0 else -h)]))[0]
            assert abs(psi(zj) - inside) < 1e-4 * abs(psi(zj))
        # exponential tails
        assert psi(-5.0) / psi(-6.0) == pytest.approx(math.exp(psi.eta0), rel=1e-9)


def test_wavefunction_derivative_jump_bdd():
    model = MODELS["morse"][0]
    E = solve_transcendental(model, "bdd", -9.9, model.threshold, points=600).energies[0]
    psi = wavefunction(model, "bdd", E)
    d_in = psi.basis.dpsi1(np.array([model.z0]), E)[0] * psi.P + psi.weight * psi.basis.dpsi2(np.array([model.z0]), E)[0] * psi.Q
    d_out = psi.eta0 * psi(model.z0)
    assert abs(d_in / model.inner_mass(model.z0) - d_out / model.m0) < 1e-5 * abs(d_out / model.m0)


def test_wavefunction_csv():
    model = MODELS["morse"][0]
    E = solve_transcendental(model, "zk", -9.9, model.threshold, points=600).energies[0]
    text = wavefunction(model, "zk", E).to_csv(np.linspace(-2, 2, 5))
    lines = text.splitlines()
    assert lines[0] == "z,Re_psi,Im_psi" and len(lines) == 6


def test_wavefunction_off_root_raises():
    with pytest.raises(NumericalInconsistencyError):
        wavefunction(MODELS["morse"][0], "bdd", -7.0)


def test_unsupported_orderings_and_windows():
    model = MODELS["symmetric"][0]
    for o in ("tl", "lk", "gw", "vr:-0.25"):
        with pytest.raises(UnsupportedAnalyticError):
            solve_transcendental(model, o, -8.0, -2.0)
    assert solve_transcendental(model, "vr:0", -8.4, -8.1).energies == pytest.approx([-8.25], abs=1e-6)
    with pytest.raises(InvalidParameterError):
        solve_transcendental(model, "bdd", -8.0, 0.0)


def test_quarter_power_transform_symmetric():
    model = MODELS["symmetric"][0]
    for o in ("bdd", "zk", "tl"):
        nu, eta = nu_eta(parse_ordering(o))
        t = transform_quarter_power(model, o, rho_offset=4.0 * math.asinh(-2.0))
        rho = np.linspace(t.rho(-1.9), t.rho(1.9), 7)
        lam = poschl_teller_lambda(3.0, 4.0, o)
        ref = ((0.25 + 2 * eta - 3 * nu) - lam * (lam - 1) / np.cosh(rho / 4) ** 2) / 16
        np.testing.assert_allclose(t.v_tilde(rho), ref, rtol=1e-10)
        np.testing.assert_allclose(t.z_of_rho(t.rho(np.array([-1.0, 0.3]))), [-1.0, 0.3], atol=1e-12)


def test_quarter_power_transform_exponential():
    model = MODELS["exponential"][0]
    for o in ("bdd", "zk", "lk", "gw", "tl"):
        nu, eta = nu_eta(parse_ordering(o))
        t = transform_quarter_power(model, o, rho_offset=2.0 * math.sqrt(0.5) * math.exp(-1.0))
        rho = np.linspace(t.rho(-1.9), t.rho(1.9), 7)
        g = (3 + 8 * eta - 8 * nu) / 2
        ref = 6.0 * rho**2 / 4 + g / (2 * rho**2)
        np.testing.assert_allclose(t.v_tilde(rho), ref, rtol=1e-10)


def test_half_power_transform():
    exp = transform_half_power(MODELS["exponential"][0], "bdd")
    assert exp.e_star(0.0) == pytest.approx(-0.25)
    sing = transform_half_power(MODELS["singular"][0], "zk")
    assert sing.g == pytest.approx(4.0)
    assert sing.e_star(-1.0) == pytest.approx(20.0)
    assert sing.omega_sq(-2.0) == pytest.approx(8.0)
    # V* = E* + combined: for the singular profile V* must be omega^2 z^2 / 4-free of E at fixed z
    v_star, rule = sing
    assert "E* = -AB" in rule
    assert np.isfinite(v_star(np.array([1.0, 2.0]), -3.0)).all()
