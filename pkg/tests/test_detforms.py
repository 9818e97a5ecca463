
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistxxz import detforms as df
from twistxxz import oracle
from twistxxz.bae import SolverConfig, continue_roots, solve_bae
from twistxxz.errors import OnShellError, SingularError
from twistxxz.model import ChainParams, RootSet

from conftest import generic_params


def rel(p, value, left, right, ops=()):
    ref = oracle.direct_expectation(p, left, right, ops)
    return abs(value - ref) / oracle.oracle_scale(p, left, right, ops)


def offshell(seed, n):
    g = np.random.default_rng(seed)
    return tuple(complex(x, y) for x, y in g.uniform(-0.6, 0.6, size=(n, 2)))


@pytest.fixture(scope="module", params=[2, 3])
def chain(request):
    n = request.param
    p = generic_params(n, seed=100 + n)
    sols = solve_bae(p, SolverConfig(n_starts=80))
    assert len(sols) >= 2
    return p, sols


# -- scalar products -------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_offshell_scalar_product_matches_oracle(n):
    p = generic_params(n, seed=n)
    U, L = offshell(1, n), offshell(2, n)
    assert rel(p, df.scalar_product_offshell(p, U, L), U, L) <= 1e-9


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_scalar_product_literal_sum(n):
    p = generic_params(n, seed=n + 10)
    U, L = offshell(3, n), offshell(4, n)
    det = df.scalar_product_offshell(p, U, L)
    assert abs(df.scalar_product_sum(p, U, L) - det) <= 1e-9 * oracle.oracle_scale(p, U, L)


def test_p_matrix_entries_are_tau_sums():
    from twistxxz.model import tau_func

    p = generic_params(2, seed=1)
    U, L = offshell(5, 2), offshell(6, 2)
    P = df.p_matrix(p, U, L)
    t1 = p.thetas[0]
    ref = tau_func(p, U, L, 0, t1) + tau_func(p, U, L, 1, t1)
    assert abs(P[0, 0] - ref) <= 1e-14 * abs(ref)


def test_onshell_scalar_products(chain):
    p, sols = chain
    a, b = sols[0], sols[1]
    L = offshell(7, p.n_sites)
    left = df.scalar_product_onshell_left(p, a, L)
    assert rel(p, left, a, L) <= 1e-9
    assert abs(left - df.scalar_product_offshell(p, a, L)) <= 1e-8 * oracle.oracle_scale(p, a, L)
    lsum = df.scalar_product_onshell_left_sum(p, a, L)
    assert abs(lsum - left) <= 1e-9 * oracle.oracle_scale(p, a, L)
    right = df.scalar_product_onshell_right(p, L, b)
    assert rel(p, right, L, b) <= 1e-9
    both_l = df.scalar_product_onshell_left(p, a, a)
    both_r = df.scalar_product_onshell_right(p, a, a)
    assert abs(both_l - both_r) <= 1e-9 * oracle.oracle_scale(p, a, a)


def test_onshell_precondition():
    p = generic_params(2, seed=3)
    U, L = offshell(8, 2), offshell(9, 2)
    with pytest.raises(OnShellError):
        df.scalar_product_onshell_left(p, U, L)
    with pytest.raises(OnShellError):
        df.scalar_product_onshell_right(p, U, L)
    with pytest.raises(OnShellError):
        df.ff_sigma_minus(p, U, L, 1)


def test_degenerate_thetas_rejected():
    p = ChainParams(2, 1.0, (0.1, 0.1))
    with pytest.raises(SingularError):
        df.scalar_product_offshell(p, offshell(1, 2), offshell(2, 2))


# -- form factors and correlators ------------------------------------------


def test_form_factors_match_oracle(chain):
    p, sols = chain
    for a, b in [(sols[0], sols[1]), (sols[1], sols[1])]:
        for i in range(1, p.n_sites + 1):
            assert rel(p, df.ff_sigma_minus(p, a, b, i), a, b, [("sminus", i)]) <= 1e-8
            assert rel(p, df.ff_sigma_z(p, a, b, i), a, b, [("sz", i)]) <= 1e-8
            assert rel(p, df.ff_sigma_z(p, a, b, i, corner="u"), a, b, [("sz", i)]) <= 1e-8
            c = df.c_element(p, a, b, i)
            assert rel(p, c, a, b, [("C", p.thetas[i - 1])]) <= 1e-8
            assert abs(df.c_element_sum(p, a, b, i) - c) <= 1e-9 * oracle.oracle_scale(p, a, b)
            assert rel(p, df.d_element(p, a, b, i), a, b, [("D", p.thetas[i - 1])]) <= 1e-8


def test_two_point_functions_match_oracle(chain):
    p, sols = chain
    th = p.thetas
    for a, b in [(sols[0], sols[1]), (sols[1], sols[1])]:
        for i in range(2, p.n_sites + 1):
            mm = [("sminus", i - 1), ("sminus", i)]
            assert rel(p, df.cf_minus_minus(p, a, b, i), a, b, mm) <= 1e-8
            cc = df.cc_element(p, a, b, i)
            assert rel(p, cc, a, b, [("C", th[i - 2]), ("C", th[i - 1])]) <= 1e-7
            assert abs(df.cc_element_sum(p, a, b, i) - cc) <= 1e-9 * oracle.oracle_scale(p, a, b)
            dd = df.dd_element(p, a, b, i)
            assert rel(p, dd, a, b, [("D", th[i - 2]), ("D", th[i - 1])]) <= 1e-8
            zz = [("sz", i - 1), ("sz", i)]
            assert rel(p, df.cf_zz(p, a, b, i), a, b, zz) <= 1e-7


def test_literal_sums_four_sites():
    p = generic_params(4, seed=41)
    sols = solve_bae(p, SolverConfig(n_starts=60))
    a, b = sols[0], sols[-1]
    scale = oracle.oracle_scale(p, a, b)
    L = offshell(10, 4)
    left = df.scalar_product_onshell_left(p, a, L)
    assert abs(df.scalar_product_onshell_left_sum(p, a, L) - left) <= 1e-9 * oracle.oracle_scale(p, a, L)
    for i in (1, 4):
        assert abs(df.c_element_sum(p, a, b, i) - df.c_element(p, a, b, i)) <= 1e-9 * scale
    for i in (2, 4):
        assert abs(df.cc_element_sum(p, a, b, i) - df.cc_element(p, a, b, i)) <= 1e-9 * scale


def test_fcc_last_rows_have_zero_last_column():
    p = generic_params(3, seed=3)
    sols = solve_bae(p, SolverConfig(n_starts=60))
    M = df.fcc_matrix(p, sols[0].roots, sols[1].roots, 2, 1)
    assert M.shape == (5, 4)
    assert M[3, 3] == 0 and M[4, 3] == 0


def test_site_validation():
    p = generic_params(3)
    sols = solve_bae(p, SolverConfig(n_starts=40))
    with pytest.raises(ValueError):
        df.ff_sigma_minus(p, sols[0], sols[0], 0)
    with pytest.raises(ValueError):
        df.cf_minus_minus(p, sols[0], sols[0], 1)


@settings(max_examples=10, deadline=None)
@given(st.permutations(range(3)), st.permutations(range(3)))
def test_permutation_invariance(pu, pl):
    p = ChainParams(3, 1.0, (0.1, -0.2, 0.25))
    U, L = offshell(11, 3), offshell(12, 3)
    a = df.scalar_product_offshell(p, U, L)
    b = df.scalar_product_offshell(p, [U[k] for k in pu], [L[k] for k in pl])
    assert a == b


# -- approach to the homogeneous tables ------------------------------------


def _tracked(bench, eps=1e-4):
    U, L = bench
    path = [ChainParams(3, 1.0, (e, 2 * e, 3 * e)) for e in (eps * 8, eps * 4, eps * 2, eps)]
    p = path[-1]
    return p, continue_roots(path, U)[-1], continue_roots(path, L)[-1]


def test_small_inhomogeneity_approaches_tables(bench):
    p, U, L = _tracked(bench)
    assert abs(df.scalar_product_offshell(p, bench[1], bench[1]) - 0.003625763123158) <= 1e-3
    assert abs(df.ff_sigma_z(p, U, L, 1) - 0.200953522733016j) <= 1e-3
    assert abs(df.ff_sigma_minus(p, U, L, 1) - 0.113108828168255j) <= 1e-3
    assert abs(df.cf_minus_minus(p, L, L, 2) - 0.001006270991793) <= 1e-3


# -- requests and records --------------------------------------------------


def test_request_validation_and_dispatch(chain):
    p, sols = chain
    a, b = sols[0], sols[1]
    with pytest.raises(ValueError):
        df.FormFactorRequest(p, a, b, 1, "bogus")
    with pytest.raises(ValueError):
        df.FormFactorRequest(p, a, b, 1, "sz_sz")
    with pytest.raises(ValueError):
        df.FormFactorRequest(p, a, b, p.n_sites + 1, "sz")
    req = df.FormFactorRequest(p, a, b, 1, "sminus")
    assert df.evaluate(req) == df.ff_sigma_minus(p, a, b, 1)


def test_result_record_digests_are_stable():
    p = ChainParams(3, 1.0)
    r = RootSet((0.1, 0.2, 0.3))
    rec = df.result_record("sz", 1, 0.5j, p, r, (0.3, 0.2, 0.1))
    assert rec["value"] == {"re": 0.0, "im": 0.5}
    assert rec["left_digest"] == rec["right_digest"] == df.digest(r)
    assert rec["params_digest"] == df.digest(ChainParams(3, 1.0, (0, 0, 0)))
    assert len(rec["params_digest"]) == 16
    assert df.digest(ChainParams(3, 1.0)) != df.digest(ChainParams(3, 0.9))


def test_form_factor_permutation_invariance(chain):
    p, sols = chain
    a, b = sols[0], sols[1]
    ra, rb = a.roots[::-1], b.roots[1:] + b.roots[:1]
    assert df.ff_sigma_z(p, a, b, 1) == df.ff_sigma_z(p, ra, rb, 1)
    if p.n_sites >= 2:
        assert df.cf_zz(p, a, b, 2) == df.cf_zz(p, ra, rb, 2)
