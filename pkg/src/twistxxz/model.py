"""Scalar building blocks of the twisted XXZ chain.

Every function is written against :mod:`twistxxz.numeric`'s generic
``sinh``/``exp`` so it evaluates on complex numbers and on :class:`Jet`
arguments alike.  Root arguments accept a :class:`RootSet` or any sequence of
complex numbers.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, SingularError
from .numeric import exp, lu_determinant, sinh, value_of

POLE_TOL = 1e-12
DEGENERACY_TOL = 1e-12


def _as_complex(z) -> complex:
    if isinstance(z, dict):
        return complex(z.get("re", 0.0), z.get("im", 0.0))
    if isinstance(z, (list, tuple)) and len(z) == 2:
        return complex(z[0], z[1])
    return complex(z)


def _guard(x, what: str):
    """Raise if the constant term of ``x`` is within POLE_TOL of zero."""
    if abs(value_of(x)) < POLE_TOL:
        raise SingularError(f"pole: {what} vanishes")
    return x


@dataclass(frozen=True)
class ChainParams:
    n_sites: int
    eta: complex
    thetas: tuple = ()

    def __post_init__(self):
        n = int(self.n_sites)
        if n < 1:
            raise ValueError(f"n_sites must be positive, got {self.n_sites}")
        eta = _as_complex(self.eta)
        th = tuple(_as_complex(t) for t in self.thetas) if len(self.thetas) else (0j,) * n
        if len(th) != n:
            raise DimensionError(f"expected {n} inhomogeneities, got {len(th)}")
        if not all(cmath.isfinite(z) for z in th + (eta,)):
            raise ValueError("chain parameters must be finite")
        if abs(cmath.sinh(eta)) < POLE_TOL:
            raise SingularError("sinh(eta) vanishes")
        object.__setattr__(self, "n_sites", n)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "thetas", th)

    @classmethod
    def homogeneous(cls, n: int, eta) -> "ChainParams":
        return cls(n, eta, (0j,) * int(n))

    @property
    def is_homogeneous(self) -> bool:
        return all(t == 0 for t in self.thetas)

    def degeneracies(self, tol: float = DEGENERACY_TOL) -> list[tuple[int, int, str]]:
        """Pairs (i, j), 1-based, where theta_i - theta_j is 0 or +-eta."""
        out = []
        th, eta = self.thetas, self.eta
        for i in range(self.n_sites):
            for j in range(i + 1, self.n_sites):
                d = th[i] - th[j]
                for shift, tag in ((0, "equal"), (eta, "+eta"), (-eta, "-eta")):
                    if abs(cmath.sinh(d - shift)) < tol:
                        out.append((i + 1, j + 1, tag))
        return out

    def require_nondegenerate(self):
        bad = self.degeneracies()
        if bad:
            i, j, tag = bad[0]
            raise SingularError(f"degenerate inhomogeneities: theta_{i} - theta_{j} ({tag})")
        return self

    def with_thetas(self, thetas) -> "ChainParams":
        return ChainParams(self.n_sites, self.eta, tuple(thetas))

    def to_json(self) -> dict:
        return {
            "n": self.n_sites,
            "eta": _cjson(self.eta),
            "thetas": [_cjson(t) for t in self.thetas],
        }


def _cjson(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def canonical_order(roots: Iterable) -> tuple:
    """Sort by (imaginary part, real part); imaginary parts are rounded so
    roots on the same line compare by real part despite rounding noise."""
    rs = [complex(r) for r in roots]
    return tuple(sorted(rs, key=lambda z: (round(z.imag, 9), z.real)))


@dataclass(frozen=True)
class RootSet:
    roots: tuple
    residual: float = math.nan
    on_shell: bool = False
    eta: complex | None = None
    thetas: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "roots", canonical_order(self.roots))
        if self.eta is not None:
            object.__setattr__(self, "eta", _as_complex(self.eta))
        if self.thetas is not None:
            object.__setattr__(self, "thetas", tuple(_as_complex(t) for t in self.thetas))

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    @property
    def n(self) -> int:
        return len(self.roots)

    def array(self) -> np.ndarray:
        return np.array(self.roots, dtype=complex)

    def to_json(self) -> dict:
        d = {
            "n": self.n,
            "eta": _cjson(self.eta) if self.eta is not None else None,
            "roots": [_cjson(r) for r in self.roots],
            "residual": None if math.isnan(self.residual) else float(self.residual),
            "on_shell": bool(self.on_shell),
        }
        if self.thetas is not None:
            d["thetas"] = [_cjson(t) for t in self.thetas]
        return d

    @classmethod
    def from_json(cls, d: dict) -> "RootSet":
        roots = [_as_complex(r) for r in d["roots"]]
        if "n" in d and d["n"] is not None and int(d["n"]) != len(roots):
            raise DimensionError(f"root file says n={d['n']} but lists {len(roots)} roots")
        res = d.get("residual")
        eta = d.get("eta")
        th = d.get("thetas")
        return cls(
            tuple(roots),
            math.nan if res is None else float(res),
            bool(d.get("on_shell", False)),
            None if eta is None else _as_complex(eta),
            None if th is None else tuple(_as_complex(t) for t in th),
        )


def dump_rootsets(sets: Sequence[RootSet], path) -> None:
    with open(path, "w") as fh:
        json.dump([s.to_json() for s in sets], fh, indent=2)
        fh.write("\n")


def load_rootsets(path) -> list[RootSet]:
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = [data]
    return [RootSet.from_json(d) for d in data]


def _roots(r) -> tuple:
    return r.roots if isinstance(r, RootSet) else tuple(complex(x) for x in r)


# ---------------------------------------------------------------------------
# basic functions


def a_func(p: ChainParams, u):
    se = cmath.sinh(p.eta)
    out = 1.0
    for t in p.thetas:
        out = out * sinh(u - t + p.eta) / se
    return out


def d_func(p: ChainParams, u):
    se = cmath.sinh(p.eta)
    out = 1.0
    for t in p.thetas:
        out = out * sinh(u - t) / se
    return out


def q_func(roots, u, eta):
    se = cmath.sinh(eta)
    out = 1.0
    for r in _roots(roots):
        out = out * sinh(u - r) / se
    return out


def c_func(p: ChainParams, roots, u):
    rs = _roots(roots)
    s = sum(p.thetas) - sum(rs)
    n = p.n_sites
    return exp(u - n * p.eta + s) - exp(-u - p.eta - s)


def lambda_tq(p: ChainParams, roots, u):
    """Transfer-matrix eigenvalue from the inhomogeneous T-Q relation."""
    rs = _roots(roots)
    for r in rs:
        _guard(sinh(u - r), "Q(u) (u sits on a Bethe root)")
    eta = p.eta
    a = a_func(p, u)
    d = d_func(p, u)
    num = (
        a * exp(u) * q_func(rs, u - eta, eta)
        - exp(-u - eta) * d * q_func(rs, u + eta, eta)
        - c_func(p, rs, u) * a * d
    )
    return num / q_func(rs, u, eta)


def energy(roots, eta, n: int) -> complex:
    rs = _roots(roots)
    eta = complex(eta)
    total = 0j
    for r in rs:
        s0, s1 = cmath.sinh(r), cmath.sinh(r + eta)
        if abs(s0) < POLE_TOL or abs(s1) < POLE_TOL:
            raise SingularError(f"root {r} sits on a coth pole of the energy")
        total += cmath.cosh(r + eta) / s1 - cmath.cosh(r) / s0
    return 2 * cmath.sinh(eta) * total - n * cmath.cosh(eta) - 2 * cmath.sinh(eta)


def dbar(roots, u, h: int, eta):
    se = cmath.sinh(eta)
    out = 1.0
    for r in _roots(roots):
        out = out * sinh(r - u + eta * h) / se
    return out


def tau_func(p: ChainParams, uroots, lroots, h: int, u):
    eta = p.eta
    out = dbar(uroots, u, h, eta) * dbar(lroots, u, h, eta)
    if h:
        dm = _guard(d_func(p, u - eta), "d(u - eta)")
        out = out * (-a_func(p, u) / dm) * exp(2 * u + eta * (p.n_sites - 1))
    return out


def xi_func(p: ChainParams, uroots, lroots, theta_i, theta_j):
    eta = p.eta
    se = cmath.sinh(eta)
    us = _roots(uroots)
    dm = _guard(d_func(p, theta_j - eta), "d(theta_j - eta)")
    out = dbar(us, theta_j, 1, eta) * dbar(lroots, theta_j, 1, eta)
    out = out * (-a_func(p, theta_j) / dm) * exp(theta_i + eta * p.n_sites)
    shift = exp(-theta_i + theta_j - eta)
    for uk, tk in zip(us, p.thetas):
        den = _guard(sinh(theta_j - uk - eta), "sinh(theta_j - u_k - eta)")
        out = out * shift * sinh(theta_j - uk) / den * sinh(theta_j - tk - eta) / se
    return out


def gamma1(p: ChainParams, uroots, lroots, i: int, jp: int):
    """Sites ``i`` and ``jp`` are 1-based."""
    th = p.thetas
    den = _guard(cmath.sinh(th[i - 1] - th[i - 2]), "sinh(theta_i - theta_{i-1})")
    return -cmath.sinh(th[i - 2] - th[jp - 1]) / den * xi_func(p, uroots, lroots, th[i - 1], th[jp - 1])


def gamma2(p: ChainParams, uroots, lroots, i: int, j: int):
    th = p.thetas
    return -cmath.sinh(th[i - 1] - th[j - 1] + p.eta) * xi_func(p, uroots, lroots, th[i - 2], th[j - 1])


def phi_jk(p: ChainParams, j: int, k: int) -> complex:
    th, eta = p.thetas, p.eta
    d = th[j - 1] - th[k - 1]
    return cmath.sinh(eta - d) * cmath.sinh(eta + d) / cmath.sinh(eta) ** 2


def phi_product(p: ChainParams) -> complex:
    """Product of phi_{mn} over all pairs m < n."""
    out = 1 + 0j
    for m in range(1, p.n_sites + 1):
        for n in range(m + 1, p.n_sites + 1):
            out *= phi_jk(p, m, n)
    return out


def vandermonde(xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=complex)
    return np.exp(2.0 * np.outer(xs, np.arange(xs.size)))


def vandermonde_det(xs) -> complex:
    e = np.exp(2.0 * np.asarray(xs, dtype=complex))
    out = 1 + 0j
    for i in range(e.size):
        for j in range(i):
            out *= e[i] - e[j]
    return out


def sov_norm_f(p: ChainParams, h) -> complex:
    h = tuple(int(b) for b in h)
    if len(h) != p.n_sites:
        raise DimensionError(f"label length {len(h)} != {p.n_sites}")
    th = np.array(p.thetas)
    eta, n = p.eta, p.n_sites
    pre = 1 + 0j
    for l, hl in enumerate(h):
        if hl:
            pre *= -a_func(p, th[l]) * d_func(p, th[l] - eta) * cmath.exp(-eta * (n - 1))
    shifted = th - eta * np.array(h)
    # guard each factor, not the product: the product is legitimately tiny
    # for closely spaced inhomogeneities
    e = np.exp(2.0 * shifted)
    gaps = np.abs(e[:, None] - e[None, :])[np.triu_indices(n, 1)]
    if gaps.size and gaps.min() < POLE_TOL:
        raise SingularError(f"shifted Vandermonde vanishes for label {h}")
    return pre * vandermonde_det(th) / vandermonde_det(shifted)


def vandermonde_det_lu(xs) -> complex:
    return lu_determinant(vandermonde(xs))


__all__ = [
    "ChainParams", "RootSet", "canonical_order", "dump_rootsets", "load_rootsets",
    "a_func", "d_func", "q_func", "c_func", "lambda_tq", "energy", "dbar",
    "tau_func", "xi_func", "gamma1", "gamma2", "phi_jk", "phi_product",
    "vandermonde", "vandermonde_det", "vandermonde_det_lu", "sov_norm_f",
]
