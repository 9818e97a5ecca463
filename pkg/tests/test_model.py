import cmath
import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistxxz import model, oracle
from twistxxz.bae import lambda_analyticity
from twistxxz.errors import DimensionError, SingularError
from twistxxz.model import (
    ChainParams,
    RootSet,
    a_func,
    c_func,
    d_func,
    dbar,
    energy,
    gamma1,
    gamma2,
    lambda_tq,
    phi_jk,
    q_func,
    sov_norm_f,
    tau_func,
    vandermonde,
    vandermonde_det,
    vandermonde_det_lu,
    xi_func,
)
from twistxxz.numeric import Jet

from conftest import generic_params

U_PUB = (
    -1.637416729786854 + 1.570796326794897j,
    -0.500000000000000 + 1.570796326794896j,
    0.637416729786854 + 1.570796326794897j,
)
L_PUB = (-1.431625849182040, -0.500000000000000, 0.431625849182040)
TH3 = (0.1, -0.2, 0.3j)


def prod(xs):
    out = 1 + 0j
    for x in xs:
        out *= x
    return out


# -- parameters and root sets ----------------------------------------------


def test_chain_params_defaults_to_homogeneous():
    p = ChainParams(3, 1.0)
    assert p.thetas == (0j, 0j, 0j) and p.is_homogeneous


def test_chain_params_validation():
    with pytest.raises(ValueError):
        ChainParams(0, 1.0)
    with pytest.raises(DimensionError):
        ChainParams(3, 1.0, (0.1, 0.2))
    with pytest.raises(SingularError):
        ChainParams(2, 0.0)
    with pytest.raises(SingularError):
        ChainParams(2, 1j * cmath.pi)


def test_degeneracies_detected():
    p = ChainParams(3, 1.0, (0.0, 1.0, 0.0))
    tags = {(i, j, t) for i, j, t in p.degeneracies()}
    assert (1, 2, "-eta") in tags and (1, 3, "equal") in tags and (2, 3, "+eta") in tags
    with pytest.raises(SingularError):
        p.require_nondegenerate()
    assert not generic_params(3).degeneracies()


def test_rootset_canonical_order_and_equality():
    a = RootSet((0.4, -0.2 + 1j, -0.3))
    b = RootSet((-0.2 + 1j, -0.3, 0.4))
    assert a == b
    assert a.roots == (-0.3, 0.4, -0.2 + 1j)


def test_rootset_json_round_trip(tmp_path):
    rs = RootSet(U_PUB, 3e-15, True, 1.0, (0, 0, 0))
    d = rs.to_json()
    assert set(d) >= {"n", "eta", "roots", "residual", "on_shell"}
    assert d["eta"] == {"re": 1.0, "im": 0.0}
    assert rs == RootSet.from_json(json.loads(json.dumps(d)))
    path = tmp_path / "r.json"
    model.dump_rootsets([rs, RootSet(L_PUB)], path)
    back = model.load_rootsets(path)
    assert back[0] == rs and back[1].roots == RootSet(L_PUB).roots


def test_rootset_json_rejects_wrong_count():
    d = RootSet(L_PUB).to_json()
    d["n"] = 4
    with pytest.raises(DimensionError):
        RootSet.from_json(d)


# -- building blocks -------------------------------------------------------


def test_a_and_d_single_site():
    p = ChainParams(1, 1.0, (0.0,))
    assert abs(a_func(p, 0.0) - 1) < 1e-15
    assert d_func(p, 0.0) == 0


def test_a_and_d_against_products():
    p = ChainParams(3, 1.0, TH3)
    se = cmath.sinh(1.0)
    assert abs(a_func(p, 0.5) - prod(cmath.sinh(0.5 - t + 1) / se for t in TH3)) < 1e-14
    assert abs(d_func(p, 0.5) - prod(cmath.sinh(0.5 - t) / se for t in TH3)) < 1e-14
    for t in TH3:
        assert d_func(p, t) == 0


def test_q_function():
    assert q_func(L_PUB, L_PUB[0], 1.0) == 0
    assert abs(q_func((0.0,), 1.0, 1.0) - 1) < 1e-15
    ref = prod(cmath.sinh(0.7 - r) / cmath.sinh(1.0) for r in L_PUB)
    assert abs(q_func(L_PUB, 0.7, 1.0) - ref) < 1e-14


def test_c_function():
    p = ChainParams(3, 1.0)
    s = -sum(L_PUB)
    ref = cmath.exp(0 - 3 + s) - cmath.exp(-0 - 1 - s)
    assert abs(c_func(p, L_PUB, 0.0) - ref) < 1e-14
    # zero where the exponents coincide: 2u = (N-1) eta - 2 sum(theta - lambda)
    u0 = (3 * 1.0 - 1.0) / 2 - s
    assert abs(c_func(p, L_PUB, u0)) < 1e-14


def test_lambda_at_zero_for_benchmark_roots():
    p = ChainParams(3, 1.0)
    assert abs(lambda_tq(p, U_PUB, 0.0) - 1) < 1e-12
    assert abs(lambda_tq(p, L_PUB, 0.0) + 1) < 1e-12


def test_lambda_pole_guard():
    with pytest.raises(SingularError):
        lambda_tq(ChainParams(3, 1.0), L_PUB, L_PUB[1])


def test_lambda_pole_free_at_on_shell_roots(bench):
    p = ChainParams(3, 1.0)
    for rs in bench:
        assert lambda_analyticity(p, rs, 1e-4) <= 1e-6


def test_energy_matches_oracle_spectrum():
    evals = np.linalg.eigvalsh(oracle.hamiltonian(3, 1.0))
    for roots in (U_PUB, L_PUB):
        e = energy(roots, 1.0, 3)
        assert abs(e.imag) < 1e-10
        assert np.abs(evals - e).min() < 1e-9
    # the two sets share a degenerate level but carry different eigenvalue functions
    p = ChainParams(3, 1.0)
    assert abs(lambda_tq(p, U_PUB, 0.3) - lambda_tq(p, L_PUB, 0.3)) > 1e-3


def test_energy_pole():
    with pytest.raises(SingularError):
        energy((0.0, 0.4), 1.0, 2)
    with pytest.raises(SingularError):
        energy((-1.0, 0.4), 1.0, 2)


def test_dbar():
    assert dbar(L_PUB, L_PUB[0], 0, 1.0) == 0
    assert abs(dbar((0.3,), 0.1, 1, 1.0) - cmath.sinh(1.2) / cmath.sinh(1)) < 1e-15
    ref = prod(cmath.sinh(r - 0.2 + 1) / cmath.sinh(1) for r in L_PUB)
    assert abs(dbar(L_PUB, 0.2, 1, 1.0) - ref) < 1e-14


def test_tau_h0_and_transcription():
    p = generic_params(2, seed=3)
    U, L = (0.11 + 0.2j, -0.3 + 0.05j), (0.25 - 0.1j, -0.07 + 0.3j)
    u = 0.13 - 0.04j
    assert tau_func(p, U, L, 0, u) == dbar(U, u, 0, p.eta) * dbar(L, u, 0, p.eta)
    eta, se = p.eta, cmath.sinh(p.eta)
    a = prod(cmath.sinh(u - t + eta) / se for t in p.thetas)
    dm = prod(cmath.sinh(u - eta - t) / se for t in p.thetas)
    db = prod(cmath.sinh(r - u + eta) / se for r in U + L)
    ref = db * (-a / dm) * cmath.exp(2 * u + eta * 1)
    assert abs(tau_func(p, U, L, 1, u) - ref) <= 1e-14 * abs(ref)


def test_xi_zero_factor_and_transcription():
    p = generic_params(2, seed=5)
    th = p.thetas
    U = (th[1], 0.4 - 0.2j)
    assert xi_func(p, U, (0.1, 0.2), th[0], th[1]) == 0
    U, L = (0.31 + 0.1j, -0.22 + 0.4j), (0.05 - 0.3j, 0.17 + 0.12j)
    ti, tj, eta, se = th[0], th[1], p.eta, cmath.sinh(p.eta)
    ref = dbar(U, tj, 1, eta) * dbar(L, tj, 1, eta)
    ref *= -a_func(p, tj) / d_func(p, tj - eta) * cmath.exp(ti + eta * 2)
    for uk, tk in zip(U, th):
        ref *= cmath.exp(-ti + tj - eta) * cmath.sinh(tj - uk) / cmath.sinh(tj - uk - eta) * cmath.sinh(tj - tk - eta) / se
    assert abs(xi_func(p, U, L, ti, tj) - ref) <= 1e-14 * abs(ref)


def test_gamma_functions():
    p = generic_params(2, seed=5)
    th = p.thetas
    U, L = (0.31 + 0.1j, -0.22 + 0.4j), (0.05 - 0.3j, 0.17 + 0.12j)
    assert gamma1(p, U, L, 2, 1) == 0  # theta_j' = theta_{i-1}
    ref1 = -cmath.sinh(th[0] - th[1]) / cmath.sinh(th[1] - th[0]) * xi_func(p, U, L, th[1], th[1])
    assert abs(gamma1(p, U, L, 2, 2) - ref1) <= 1e-14 * abs(ref1)
    ref2 = -cmath.sinh(th[1] - th[0] + p.eta) * xi_func(p, U, L, th[0], th[0])
    assert abs(gamma2(p, U, L, 2, 1) - ref2) <= 1e-14 * abs(ref2)
    with pytest.raises(SingularError):
        gamma1(ChainParams(2, 1.0, (0.1, 0.1)), U, L, 2, 1)


def test_phi_jk():
    p = ChainParams(3, 1.0, (0.2, 0.2, -0.8))
    assert abs(phi_jk(p, 1, 2) - 1) < 1e-15
    assert abs(phi_jk(p, 1, 3)) < 1e-15
    q = generic_params(3)
    assert abs(phi_jk(q, 1, 3) - phi_jk(q, 3, 1)) < 1e-15


def test_vandermonde():
    assert vandermonde_det([0.3]) == 1
    y = 0.4 - 0.1j
    assert abs(vandermonde_det([0, y]) - (cmath.exp(2 * y) - 1)) < 1e-15
    xs = np.random.default_rng(42).uniform(-0.5, 0.5, 5) + 0.1j
    assert abs(vandermonde_det(xs) - vandermonde_det_lu(xs)) <= 1e-12 * abs(vandermonde_det(xs))
    assert vandermonde(xs).shape == (5, 5)


def test_sov_norm_special_labels():
    p = ChainParams(3, 1.0, (0.1, -0.2, 0.25))
    assert sov_norm_f(p, (0, 0, 0)) == 1
    q = ChainParams(1, 1.0, (0.3,))
    ref = -a_func(q, 0.3) * d_func(q, 0.3 - 1.0)
    assert abs(sov_norm_f(q, (1,)) - ref) < 1e-14
    with pytest.raises(DimensionError):
        sov_norm_f(p, (0, 1))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_sov_norm_matches_oracle_inner_products(n):
    p = ChainParams(n, 1.0, (0.1, -0.2, 0.25, 0.05 + 0.1j)[:n])
    for h in itertools.product((0, 1), repeat=n):
        left = oracle.sov_state(p, h, "left")
        right = oracle.sov_state(p, h, "right")
        ref = left @ right
        assert abs(sov_norm_f(p, h) - ref) <= 1e-9 * abs(ref)


def test_functions_agree_on_order_zero_jets():
    p = generic_params(3, seed=9)
    U, L = (0.31 + 0.1j, -0.22 + 0.4j, 0.1), (0.05 - 0.3j, 0.17 + 0.12j, -0.4)
    u = 0.21 + 0.07j
    j = Jet.constant(u, 0)
    pairs = [
        (a_func(p, u), a_func(p, j)),
        (d_func(p, u), d_func(p, j)),
        (q_func(L, u, p.eta), q_func(L, j, p.eta)),
        (c_func(p, L, u), c_func(p, L, j)),
        (lambda_tq(p, L, u), lambda_tq(p, L, j)),
        (tau_func(p, U, L, 1, u), tau_func(p, U, L, 1, j)),
        (xi_func(p, U, L, p.thetas[0], u), xi_func(p, U, L, p.thetas[0], j)),
    ]
    for plain, jet in pairs:
        assert abs(plain - jet.value) <= 1e-12 * max(1.0, abs(plain))


@settings(max_examples=40, deadline=None)
@given(st.permutations(range(3)), st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
def test_lambda_symmetric_in_roots(perm, x, y):
    p = ChainParams(3, 1.0, TH3)
    roots = (0.3 + 0.1j, -0.4, 0.1 - 0.2j)
    u = complex(x, y) + 2.0
    a = lambda_tq(p, roots, u)
    b = lambda_tq(p, [roots[k] for k in perm], u)
    assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


@settings(max_examples=40, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1))
def test_model_derivatives_match_finite_differences(x, y):
    from twistxxz.numeric import jet_derivatives

    p = ChainParams(3, 1.0, TH3)
    u0 = complex(x, y) * 0.5 + 2.0
    f = lambda u: lambda_tq(p, L_PUB, u)
    ders = jet_derivatives(f, u0, 3)
    h = 1e-5
    fd1 = (f(u0 + h) - f(u0 - h)) / (2 * h)
    assert abs(ders[1] - fd1) <= 1e-7 * max(1.0, abs(ders[1]))
    h = 1e-3
    fd3 = (f(u0 + 2 * h) - 2 * f(u0 + h) + 2 * f(u0 - h) - f(u0 - 2 * h)) / (2 * h**3)
    assert abs(ders[3] - fd3) <= 1e-4 * max(1.0, abs(ders[3]))
