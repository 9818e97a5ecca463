"""Determinant representations for inhomogeneous chains.

Scalar products, the sigma^-/sigma^z form factors and the adjacent
sigma^- sigma^- / sigma^z sigma^z correlators, each as a ratio of small
determinants over the Vandermonde |V(theta)|.  Literal SoV sums are kept next
to the determinant forms for cross-checking.

Sites are 1-based throughout.  ``U`` is the left root set {u_k}, ``L`` the
right one {lambda_k}.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass

import numpy as np

from . import model
from .bae import require_on_shell
from .errors import DimensionError, SingularError
from .model import ChainParams, RootSet, lambda_tq, tau_func, xi_func
from .numeric import lu_determinant

ON_SHELL_TOL = 1e-8
KINDS = ("sminus", "sz", "sminus_sminus", "sz_sz")


def _det(m) -> complex:
    return lu_determinant(m)


def _check(p: ChainParams, *sets) -> list[tuple]:
    """Validate sizes and return each root set in canonical order, so results
    do not depend on how the caller listed the roots."""
    p.require_nondegenerate()
    out = []
    for s in sets:
        rs = model._roots(s)
        if len(rs) != p.n_sites:
            raise DimensionError(f"need {p.n_sites} roots, got {len(rs)}")
        out.append(model.canonical_order(rs))
    return out


def _site(p: ChainParams, i: int, pair: bool = False):
    lo = 2 if pair else 1
    if not lo <= i <= p.n_sites:
        raise ValueError(f"site must lie in {lo}..{p.n_sites}, got {i}")


def vdet(p: ChainParams) -> complex:
    return model.vandermonde_det(p.thetas)


def p_matrix(p: ChainParams, U, L, weight=None) -> np.ndarray:
    """N x N matrix sum_h tau(h, theta_m) e^{2(theta_m - eta h)(n-1)} w(m, h)."""
    n, eta, th = p.n_sites, p.eta, p.thetas
    cols = np.arange(n)
    M = np.zeros((n, n), dtype=complex)
    for m in range(n):
        for h in (0, 1):
            w = tau_func(p, U, L, h, th[m])
            if weight is not None:
                w *= weight(m, h)
            M[m] += w * np.exp(2 * (th[m] - eta * h) * cols)
    return M


def _sinh_weight(p: ChainParams, *sites):
    se = np.sinh(p.eta)
    th = p.thetas

    def w(m, h):
        out = 1 + 0j
        for i in sites:
            out *= np.sinh(th[i - 1] - th[m] + p.eta * h) / se
        return out

    return w


def _row(theta, n) -> np.ndarray:
    return np.exp(2 * theta * np.arange(n))


# ---------------------------------------------------------------------------
# scalar products


def scalar_product_offshell(p: ChainParams, U, L) -> complex:
    U, L = _check(p, U, L)
    return _det(p_matrix(p, U, L)) / vdet(p)


def scalar_product_sum(p: ChainParams, U, L) -> complex:
    """The 2**N term SoV sum behind :func:`scalar_product_offshell`."""
    U, L = _check(p, U, L)
    th = np.array(p.thetas)
    total = 0j
    for h in itertools.product((0, 1), repeat=p.n_sites):
        w = 1 + 0j
        for m, hm in enumerate(h):
            w *= tau_func(p, U, L, hm, th[m])
        total += w * model.vandermonde_det(th - p.eta * np.array(h))
    return total / vdet(p)


def p_nl_matrix(p: ChainParams, U, L) -> np.ndarray:
    """Matrix for <Phi{u}|lambda> with {u} on shell."""
    n, eta, th = p.n_sites, p.eta, p.thetas
    us = model._roots(U)
    cols = np.arange(n)
    se = np.sinh(eta)
    M = np.zeros((n, n), dtype=complex)
    for i in range(n):
        t = th[i]
        lam_u = lambda_tq(p, U, t)
        dm = model.d_func(p, t - eta)
        if abs(dm) < model.POLE_TOL:
            raise SingularError("d(theta_i - eta) vanishes")
        for h in (0, 1):
            w = np.exp(eta * h * (n - 1) + t * h) * model.d_func(p, us[i])
            if h:
                w *= -lam_u / dm
            for lk in model._roots(L):
                w *= np.sinh(lk - t + eta * h) / se
            M[i] += w * np.exp(2 * (t - eta * h) * cols)
    return M


def scalar_product_onshell_left(p: ChainParams, U, L, tol: float = ON_SHELL_TOL) -> complex:
    U, L = _check(p, U, L)
    require_on_shell(p, U, tol, "left roots")
    return _det(p_nl_matrix(p, U, L)) / vdet(p)


def scalar_product_onshell_right(p: ChainParams, U, L, tol: float = ON_SHELL_TOL) -> complex:
    U, L = _check(p, U, L)
    require_on_shell(p, L, tol, "right roots")
    return _det(p_nl_matrix(p, L, U)) / vdet(p)


def scalar_product_onshell_left_sum(p: ChainParams, U, L, tol: float = ON_SHELL_TOL) -> complex:
    """Literal sum over SoV labels of the on-shell-left scalar product."""
    U, L = _check(p, U, L)
    require_on_shell(p, U, tol, "left roots")
    n, eta = p.n_sites, p.eta
    th = p.thetas
    us, ls = model._roots(U), model._roots(L)
    lam = [lambda_tq(p, U, t) for t in th]
    a_th = [model.a_func(p, t) for t in th]
    total = 0j
    for h in itertools.product((0, 1), repeat=n):
        w = 1 / model.sov_norm_f(p, h)
        for j in range(n):
            w *= model.d_func(p, us[j]) * model.d_func(p, ls[j])
            if h[j]:
                w *= a_th[j] * np.exp(th[j]) * lam[j]
            for k in range(n):
                w *= np.sinh(ls[j] - th[k] + eta * h[k]) / np.sinh(ls[j] - th[k])
        total += w
    return total


# ---------------------------------------------------------------------------
# single monodromy entries at theta_i


def d_element(p: ChainParams, U, L, i: int) -> complex:
    """<u| D(theta_i) |lambda> as |F^D| / |V|."""
    U, L = _check(p, U, L)
    _site(p, i)
    return _det(p_matrix(p, U, L, _sinh_weight(p, i))) / vdet(p)


def fc_matrix(p: ChainParams, U, L, i: int, col_scale=1.0, corner=0j) -> np.ndarray:
    """Bordered (N+1) x (N+1) matrix: xi(theta_i, theta_m) column, e^{2 theta_i k} row."""
    n, th = p.n_sites, p.thetas
    M = np.zeros((n + 1, n + 1), dtype=complex)
    M[:n, :n] = p_matrix(p, U, L)
    for m in range(n):
        M[m, n] = col_scale * xi_func(p, U, L, th[i - 1], th[m])
    M[n, :n] = _row(th[i - 1], n)
    M[n, n] = corner
    return M


def c_element(p: ChainParams, U, L, i: int) -> complex:
    """<u| C(theta_i) |lambda> as |F^C| / |V|."""
    U, L = _check(p, U, L)
    _site(p, i)
    return _det(fc_matrix(p, U, L, i)) / vdet(p)


def c_element_sum(p: ChainParams, U, L, i: int) -> complex:
    """Literal SoV sum for <u| C(theta_i) |lambda>.

    Term j pins h_j = 1 and swaps row j of the shifted Vandermonde for
    e^{2 theta_i k}, with sign (-1)^{N+j+1}.
    """
    U, L = _check(p, U, L)
    _site(p, i)
    n, eta = p.n_sites, p.eta
    th = np.array(p.thetas)
    total = 0j
    for j in range(n):
        xi = xi_func(p, U, L, th[i - 1], th[j])
        others = [k for k in range(n) if k != j]
        for hs in itertools.product((0, 1), repeat=n - 1):
            w = 1 + 0j
            xs = []
            for k, hk in zip(others, hs):
                w *= tau_func(p, U, L, hk, th[k])
                xs.append(th[k] - eta * hk)
            xs.append(th[i - 1])
            sign = (-1) ** (n + (j + 1) + 1)
            total += sign * xi * w * model.vandermonde_det(xs)
    return total / vdet(p)


# ---------------------------------------------------------------------------
# products of two entries at theta_{i-1}, theta_i


def dd_element(p: ChainParams, U, L, i: int) -> complex:
    """<u| D(theta_{i-1}) D(theta_i) |lambda> as |F^DD| / |V|."""
    U, L = _check(p, U, L)
    _site(p, i, pair=True)
    return _det(p_matrix(p, U, L, _sinh_weight(p, i - 1, i))) / vdet(p)


def fcc_matrix(p: ChainParams, U, L, i: int, jp: int) -> np.ndarray:
    """(N+2) x (N+1) matrix whose row-``jp`` minors build the C C element."""
    n, eta, th = p.n_sites, p.eta, p.thetas
    M = np.zeros((n + 2, n + 1), dtype=complex)
    M[:n, :n] = p_matrix(p, U, L)
    for m in range(n):
        den = np.sinh(th[m] - th[jp - 1] - eta)
        if abs(den) < model.POLE_TOL:
            raise SingularError("sinh(theta_m - theta_j' - eta) vanishes")
        M[m, n] = model.gamma2(p, U, L, i, m + 1) / den
    M[n, :n] = _row(th[i - 2], n)
    M[n + 1, :n] = _row(th[i - 1], n)
    return M


def cc_element(p: ChainParams, U, L, i: int) -> complex:
    """<u| C(theta_{i-1}) C(theta_i) |lambda> from the reduced F^CC minors."""
    U, L = _check(p, U, L)
    _site(p, i, pair=True)
    n = p.n_sites
    total = 0j
    for jp in range(1, n + 1):
        reduced = np.delete(fcc_matrix(p, U, L, i, jp), jp - 1, axis=0)
        total += (-1) ** (n + jp) * model.gamma1(p, U, L, i, jp) * _det(reduced)
    return total / vdet(p)


def cc_element_sum(p: ChainParams, U, L, i: int) -> complex:
    """Literal SoV double sum for <u| C(theta_{i-1}) C(theta_i) |lambda>.

    Terms pin h_j' = h_j = 1 (j != j'), drop rows j' and j of the shifted
    Vandermonde and append e^{2 theta_{i-1} k}, e^{2 theta_i k}; the sign is
    (-1)^{j + j' + 1 + x} with x = 0 for j' > j and 1 for j' < j.
    """
    U, L = _check(p, U, L)
    _site(p, i, pair=True)
    n, eta = p.n_sites, p.eta
    th = np.array(p.thetas)
    total = 0j
    for jp in range(n):
        g1 = model.gamma1(p, U, L, i, jp + 1)
        for j in range(n):
            if j == jp:
                continue
            g2 = model.gamma2(p, U, L, i, j + 1)
            den = np.sinh(th[j] - th[jp] - eta)
            x = 0 if jp > j else 1
            sign = (-1) ** ((j + 1) + (jp + 1) + 1 + x)
            others = [k for k in range(n) if k not in (j, jp)]
            for hs in itertools.product((0, 1), repeat=n - 2):
                w = 1 + 0j
                xs = []
                for k, hk in zip(others, hs):
                    w *= tau_func(p, U, L, hk, th[k])
                    xs.append(th[k] - eta * hk)
                xs += [th[i - 2], th[i - 1]]
                total += sign * g1 * g2 / den * w * model.vandermonde_det(xs)
    return total / vdet(p)


# ---------------------------------------------------------------------------
# form factors and correlators


def prefactor(p: ChainParams, U, L, i: int, pair: bool = False) -> complex:
    """prod phi^-2 * prod_{j <= i-1-pair} Lam_u(theta_j) * prod_{j > i} Lam_l(theta_j)
    * prod_all Lam_l(theta_j)."""
    th = p.thetas
    out = model.phi_product(p) ** -2
    for j in range(1, i - (2 if pair else 1) + 1):
        out *= lambda_tq(p, U, th[j - 1])
    for j in range(i + 1, p.n_sites + 1):
        out *= lambda_tq(p, L, th[j - 1])
    for t in th:
        out *= lambda_tq(p, L, t)
    return out


def _on_shell_pair(p, U, L, tol):
    require_on_shell(p, U, tol, "left roots")
    require_on_shell(p, L, tol, "right roots")


def ff_sigma_minus(p: ChainParams, U, L, i: int, tol: float = ON_SHELL_TOL) -> complex:
    U, L = _check(p, U, L)
    _site(p, i)
    _on_shell_pair(p, U, L, tol)
    return prefactor(p, U, L, i) * d_element(p, U, L, i)


def fz_matrix(p: ChainParams, U, L, i: int, corner: str = "lambda") -> np.ndarray:
    side = L if corner == "lambda" else U
    return fc_matrix(p, U, L, i, 2.0, -lambda_tq(p, side, p.thetas[i - 1]))


def ff_sigma_z(p: ChainParams, U, L, i: int, tol: float = ON_SHELL_TOL, corner: str = "lambda") -> complex:
    """sigma^z_i form factor.  ``corner`` picks whose eigenvalue fills the
    bottom-right entry; the two choices differ by a multiple of <u|lambda>."""
    if corner not in ("lambda", "u"):
        raise ValueError("corner must be 'lambda' or 'u'")
    U, L = _check(p, U, L)
    _site(p, i)
    _on_shell_pair(p, U, L, tol)
    return prefactor(p, U, L, i) * _det(fz_matrix(p, U, L, i, corner)) / vdet(p)


def cf_minus_minus(p: ChainParams, U, L, i: int, tol: float = ON_SHELL_TOL) -> complex:
    U, L = _check(p, U, L)
    _site(p, i, pair=True)
    _on_shell_pair(p, U, L, tol)
    return prefactor(p, U, L, i, pair=True) * dd_element(p, U, L, i)


def cf_zz(p: ChainParams, U, L, i: int, tol: float = ON_SHELL_TOL) -> complex:
    U, L = _check(p, U, L)
    _site(p, i, pair=True)
    _on_shell_pair(p, U, L, tol)
    th = p.thetas
    v = vdet(p)
    lam_l_i = lambda_tq(p, L, th[i - 1])
    lam_u_prev = lambda_tq(p, U, th[i - 2])
    bracket = (
        4 * cc_element(p, U, L, i) * v
        - 2 * lam_l_i * _det(fc_matrix(p, U, L, i - 1))
        - lam_u_prev * _det(fz_matrix(p, U, L, i))
    )
    return prefactor(p, U, L, i, pair=True) * bracket / v


# ---------------------------------------------------------------------------
# request records


@dataclass(frozen=True)
class FormFactorRequest:
    params: ChainParams
    left: RootSet
    right: RootSet
    site: int
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        lo = 2 if self.kind in ("sminus_sminus", "sz_sz") else 1
        if not lo <= self.site <= self.params.n_sites:
            raise ValueError(f"site {self.site} invalid for kind {self.kind}")


_DISPATCH = {
    "sminus": ff_sigma_minus,
    "sz": ff_sigma_z,
    "sminus_sminus": cf_minus_minus,
    "sz_sz": cf_zz,
}


def evaluate(req: FormFactorRequest, tol: float = ON_SHELL_TOL) -> complex:
    return _DISPATCH[req.kind](req.params, req.left, req.right, req.site, tol)


def digest(obj) -> str:
    if hasattr(obj, "to_json"):
        obj = obj.to_json()
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def result_record(kind: str, site, value, params, left, right, **extra) -> dict:
    value = complex(value)
    rec = {
        "kind": kind,
        "site": site,
        "value": {"re": value.real, "im": value.imag},
        "params_digest": digest(params),
        "left_digest": digest(left if isinstance(left, RootSet) else RootSet(left)),
        "right_digest": digest(right if isinstance(right, RootSet) else RootSet(right)),
    }
    rec.update(extra)
    return rec
