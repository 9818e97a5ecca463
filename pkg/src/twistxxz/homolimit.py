"""Homogeneous limit theta_j -> 0.

Vandermonde ratios turn into derivative determinants: row m of every matrix
holds the (m-1)-th u-derivative at u = 0 of the column functions, taken from
jets, and |V| is replaced by 2^{N(N-1)/2} prod_{k<N} k!.  Quantities without a
closed homogeneous form are obtained by Richardson extrapolation of the
inhomogeneous formulas along theta = eps * (1, 2, ..., N).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import detforms, model
from .bae import SolverConfig, continue_roots, require_on_shell
from .model import ChainParams, lambda_tq, tau_func, xi_func
from .numeric import Jet, exp, lu_determinant, sinh

# three ratio-2 points leave ~2e-5 relative error for the N=3 quantities
# (large eps^3 coefficients); five bring it to ~1e-8
EPS_GRID = (1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4)
# from N = 4 on, |V| ~ eps^{N(N-1)/2} and the determinant forms lose digits
# quickly as eps shrinks, so the grid starts further out
EPS_GRID_WIDE = (4e-2, 2e-2, 1e-2, 5e-3, 2.5e-3)


def default_eps_grid(n: int) -> tuple:
    return EPS_GRID if n <= 3 else EPS_GRID_WIDE
ON_SHELL_TOL = detforms.ON_SHELL_TOL


def _params(n: int, eta) -> ChainParams:
    return ChainParams.homogeneous(n, eta)


def _as_jet(u, order: int) -> Jet:
    return u if isinstance(u, Jet) else Jet.variable(complex(u), order)


def _canon(roots) -> tuple:
    return model.canonical_order(model._roots(roots))


def _column_fn(p: ChainParams, U, L, n: int, sites: int = 0):
    """Column function sum_h tau(h, u) e^{2(u - eta h)(n-1)} sinh^k(-u + eta h)/sinh^k eta."""
    eta = p.eta
    se = np.sinh(eta)

    def f(u):
        out = 0
        for h in (0, 1):
            w = tau_func(p, U, L, h, u) * exp(2 * (u - eta * h) * (n - 1))
            for _ in range(sites):
                w = w * sinh(-u + eta * h) / se
            out = out + w
        return out

    return f


def phi_n(uroots, lroots, eta, n: int, u) -> Jet:
    """phi_n as a jet; ``u`` is a Jet or a base point (order N-1 then)."""
    U, lroots = _canon(uroots), _canon(lroots)
    p = _params(len(U), eta)
    return _column_fn(p, U, lroots, n)(_as_jet(u, max(p.n_sites - 1, 1)))


def f_minus_n(uroots, lroots, eta, n: int, u) -> Jet:
    U, lroots = _canon(uroots), _canon(lroots)
    p = _params(len(U), eta)
    return _column_fn(p, U, lroots, n, 1)(_as_jet(u, max(p.n_sites - 1, 1)))


def f_mm_n(uroots, lroots, eta, n: int, u) -> Jet:
    U, lroots = _canon(uroots), _canon(lroots)
    p = _params(len(U), eta)
    return _column_fn(p, U, lroots, n, 2)(_as_jet(u, max(p.n_sites - 1, 1)))


def xi_tilde(uroots, lroots, eta, u) -> Jet:
    U, lroots = _canon(uroots), _canon(lroots)
    p = _params(len(U), eta)
    return xi_func(p, U, lroots, 0.0, _as_jet(u, max(p.n_sites - 1, 1)))


def normalization(n: int) -> float:
    """Homogeneous limit of the Vandermonde normalization."""
    return 2.0 ** (n * (n - 1) // 2) * math.prod(math.factorial(k) for k in range(1, n))


def _derivative_rows(fn, n: int) -> np.ndarray:
    return np.array(fn(Jet.variable(0j, max(n - 1, 1))).derivatives()[:n], dtype=complex)


def derivative_matrix(p: ChainParams, U, L, sites: int = 0) -> np.ndarray:
    """N x N matrix M[m, n] = d^m/du^m of the n-th column function at 0."""
    n = p.n_sites
    cols = [_derivative_rows(_column_fn(p, U, L, k + 1, sites), n) for k in range(n)]
    return np.array(cols).T


def bordered_matrix(p: ChainParams, U, L, col_scale: float, corner: complex) -> np.ndarray:
    """(N+1) x (N+1): phi derivatives, last column col_scale * xi~ derivatives,
    last row of ones."""
    n = p.n_sites
    M = np.zeros((n + 1, n + 1), dtype=complex)
    M[:n, :n] = derivative_matrix(p, U, L)
    M[:n, n] = col_scale * _derivative_rows(lambda u: xi_func(p, U, L, 0.0, u), n)
    M[n, :n] = 1.0
    M[n, n] = corner
    return M


def _setup(uroots, lroots, eta, on_shell: bool, tol: float):
    U, L = _canon(uroots), _canon(lroots)
    if len(U) != len(L):
        raise ValueError("root sets differ in size")
    p = _params(len(U), eta)
    if on_shell:
        require_on_shell(p, U, tol, "left roots")
        require_on_shell(p, L, tol, "right roots")
    return p, U, L


def _prefactor(p, U, L, i: int, pair: bool = False) -> complex:
    n = p.n_sites
    if not (2 if pair else 1) <= i <= n:
        raise ValueError(f"site {i} out of range for N={n}")
    lam_u = lambda_tq(p, U, 0.0)
    lam_l = lambda_tq(p, L, 0.0)
    return lam_u ** (i - (2 if pair else 1)) * lam_l ** (2 * n - i)


def homogeneous_scalar_product(uroots, lroots, eta) -> complex:
    p, U, L = _setup(uroots, lroots, eta, False, 0)
    return lu_determinant(derivative_matrix(p, U, L)) / normalization(p.n_sites)


def homogeneous_ff_sminus(uroots, lroots, eta, i: int, tol: float = ON_SHELL_TOL) -> complex:
    p, U, L = _setup(uroots, lroots, eta, True, tol)
    det = lu_determinant(derivative_matrix(p, U, L, 1))
    return _prefactor(p, U, L, i) * det / normalization(p.n_sites)


def homogeneous_ff_sz(uroots, lroots, eta, i: int, tol: float = ON_SHELL_TOL) -> complex:
    p, U, L = _setup(uroots, lroots, eta, True, tol)
    M = bordered_matrix(p, U, L, 2.0, -lambda_tq(p, L, 0.0))
    return _prefactor(p, U, L, i) * lu_determinant(M) / normalization(p.n_sites)


def homogeneous_cf_mm(uroots, lroots, eta, i: int, tol: float = ON_SHELL_TOL) -> complex:
    p, U, L = _setup(uroots, lroots, eta, True, tol)
    det = lu_determinant(derivative_matrix(p, U, L, 2))
    return _prefactor(p, U, L, i, pair=True) * det / normalization(p.n_sites)


def homogeneous_cf_zz_n2(uroots, lroots, eta, tol: float = ON_SHELL_TOL) -> complex:
    """Closed form of <sigma^z_1 sigma^z_2> for two sites."""
    p, U, L = _setup(uroots, lroots, eta, True, tol)
    if p.n_sites != 2:
        raise ValueError("closed form exists only for N = 2")
    lam_u = lambda_tq(p, U, 0.0)
    lam_l = lambda_tq(p, L, 0.0)
    xi0 = complex(xi_func(p, U, L, 0.0, 0.0))
    fc = lu_determinant(bordered_matrix(p, U, L, 1.0, 0.0))
    fz = lu_determinant(bordered_matrix(p, U, L, 2.0, -lam_l))
    return lam_l**2 * (4 * xi0**2 - lam_l * fc - lam_u * fz / 2)


# ---------------------------------------------------------------------------
# epsilon extrapolation


@dataclass(frozen=True)
class Extrapolation:
    value: complex
    error: float
    samples: tuple
    eps: tuple

    def to_json(self) -> dict:
        return {
            "value": {"re": self.value.real, "im": self.value.imag},
            "error_estimate": self.error,
            "eps": list(self.eps),
        }


def richardson(samples, ratio: float = 2.0) -> tuple[complex, float]:
    """Eliminate eps, eps^2, ... from samples taken at eps, eps/r, eps/r^2, ...

    Returns the extrapolated value and the difference between the last two
    tableau levels as an error estimate.
    """
    row = [complex(s) for s in samples]
    prev = row[-1]
    k = 1
    while len(row) > 1:
        prev = row[-1]
        f = ratio**k
        row = [(f * row[j + 1] - row[j]) / (f - 1) for j in range(len(row) - 1)]
        k += 1
    return row[0], abs(row[0] - prev)


def epsilon_params(n: int, eta, eps: float) -> ChainParams:
    return ChainParams(n, eta, tuple(eps * (k + 1) for k in range(n)))


def _track(n, eta, roots, eps_grid, cfg):
    path = [epsilon_params(n, eta, e) for e in sorted(eps_grid)]
    tracked = continue_roots(path, roots, cfg)
    by_eps = {e: rs for e, rs in zip(sorted(eps_grid), tracked)}
    return [by_eps[e] for e in eps_grid]


def epsilon_limit(fn, uroots, lroots, eta, eps_grid=None, cfg: SolverConfig | None = None,
                  track: bool = True) -> Extrapolation:
    """Extrapolate fn(params, U, L) along theta = eps * (1..N) to eps -> 0.

    With ``track`` the root sets are followed by Newton continuation so they
    stay on shell for the perturbed chain; otherwise they are used as given.
    """
    cfg = cfg or SolverConfig(tol=1e-13)
    U, L = _canon(uroots), _canon(lroots)
    n = len(U)
    eps_grid = tuple(eps_grid or default_eps_grid(n))
    if track:
        Us = _track(n, eta, U, eps_grid, cfg)
        Ls = Us if np.allclose(U, L, rtol=0, atol=1e-14) else _track(n, eta, L, eps_grid, cfg)
    else:
        Us = [U] * len(eps_grid)
        Ls = [L] * len(eps_grid)
    samples = tuple(
        complex(fn(epsilon_params(n, eta, e), u, l)) for e, u, l in zip(eps_grid, Us, Ls)
    )
    value, err = richardson(samples)
    return Extrapolation(value, err, samples, tuple(eps_grid))


def homogeneous_cf_zz(uroots, lroots, eta, i: int, tol: float = ON_SHELL_TOL,
                      extrapolation_tol: float = 1e-6):
    """<sigma^z_{i-1} sigma^z_i>: closed form for N = 2, extrapolation otherwise.

    Returns ``(value, Extrapolation | None)``.  An error estimate above
    ``extrapolation_tol`` triggers a RuntimeWarning rather than an exception.
    """
    p, U, L = _setup(uroots, lroots, eta, True, tol)
    if p.n_sites == 2:
        if i != 2:
            raise ValueError("for N = 2 the pair is (1, 2), i.e. site 2")
        return homogeneous_cf_zz_n2(U, L, eta, tol), None
    ext = epsilon_limit(lambda q, u, l: detforms.cf_zz(q, u, l, i, tol), U, L, eta)
    if ext.error > extrapolation_tol * max(abs(ext.value), 1e-300):
        warnings.warn(
            f"epsilon extrapolation error {ext.error:.2e} exceeds tolerance; samples {ext.samples}",
            RuntimeWarning,
            stacklevel=2,
        )
    return ext.value, ext
