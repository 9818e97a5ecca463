"""Scalar, jet and small dense linear-algebra helpers.

Every model function in the package is written against the generic
``sinh``/``cosh``/``exp`` defined here, so the same code evaluates on plain
complex numbers and on truncated Taylor series (:class:`Jet`).
"""

from __future__ import annotations

import cmath
import math
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .errors import DimensionError, SingularJetError


class Jet:
    """Truncated Taylor series ``sum_k c_k eps**k`` with ``k <= order``.

    Coefficients are stored raw (not as derivatives); multiply by ``k!`` only
    when extracting derivatives.
    """

    __slots__ = ("coeffs",)
    __array_priority__ = 1000  # keep numpy scalars from broadcasting over us

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=complex)
        if c.ndim != 1 or c.size == 0:
            raise DimensionError("jet needs a non-empty 1-d coefficient sequence")
        c.setflags(write=False)
        self.coeffs = c

    @classmethod
    def constant(cls, value, order: int) -> "Jet":
        c = np.zeros(order + 1, dtype=complex)
        c[0] = value
        return cls(c)

    @classmethod
    def variable(cls, at, order: int) -> "Jet":
        """The identity function expanded around ``at``."""
        c = np.zeros(order + 1, dtype=complex)
        c[0] = at
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    @property
    def value(self) -> complex:
        return complex(self.coeffs[0])

    def derivatives(self) -> list[complex]:
        return [complex(c) * math.factorial(k) for k, c in enumerate(self.coeffs)]

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, Jet):
            if other.order != self.order:
                raise DimensionError(f"jet orders differ: {self.order} vs {other.order}")
            return other.coeffs
        c = np.zeros_like(self.coeffs)
        c[0] = other
        return c

    def __add__(self, other):
        return Jet(self.coeffs + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Jet(self.coeffs - self._coerce(other))

    def __rsub__(self, other):
        return Jet(self._coerce(other) - self.coeffs)

    def __neg__(self):
        return Jet(-self.coeffs)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.coeffs * complex(other))
        return Jet(_convolve(self.coeffs, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.coeffs / complex(other))
        return jet_div(self, other)

    def __rtruediv__(self, other):
        return jet_div(Jet(self._coerce(other)), self)

    def __pow__(self, p):
        return jet_pow_int(self, p)

    def __repr__(self):
        return f"Jet({list(self.coeffs)!r})"


def _convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.convolve(a, b)[: a.size]


def _check_jet(x) -> Jet:
    if not isinstance(x, Jet):
        raise TypeError(f"expected Jet, got {type(x).__name__}")
    return x


def jet_div(a: Jet, b: Jet) -> Jet:
    a, b = _check_jet(a), _check_jet(b)
    if a.order != b.order:
        raise DimensionError(f"jet orders differ: {a.order} vs {b.order}")
    b0 = b.coeffs[0]
    if b0 == 0:
        raise SingularJetError("jet division by a series with zero constant term")
    q = np.zeros_like(a.coeffs)
    for k in range(a.coeffs.size):
        q[k] = (a.coeffs[k] - np.dot(q[:k], b.coeffs[k:0:-1])) / b0
    return Jet(q)


def _sinh_cosh(x: Jet) -> tuple[Jet, Jet]:
    # s' = c x', c' = s x'  =>  k s_k = sum_j j x_j c_{k-j}
    g = x.coeffs
    n = g.size
    s = np.zeros(n, dtype=complex)
    c = np.zeros(n, dtype=complex)
    s[0] = cmath.sinh(g[0])
    c[0] = cmath.cosh(g[0])
    jg = np.arange(n) * g
    for k in range(1, n):
        s[k] = np.dot(jg[1 : k + 1], c[k - 1 :: -1][:k]) / k
        c[k] = np.dot(jg[1 : k + 1], s[k - 1 :: -1][:k]) / k
    return Jet(s), Jet(c)


def jet_sinh(x: Jet) -> Jet:
    return _sinh_cosh(_check_jet(x))[0]


def jet_cosh(x: Jet) -> Jet:
    return _sinh_cosh(_check_jet(x))[1]


def jet_exp(x: Jet) -> Jet:
    g = _check_jet(x).coeffs
    n = g.size
    f = np.zeros(n, dtype=complex)
    f[0] = cmath.exp(g[0])
    jg = np.arange(n) * g
    for k in range(1, n):
        f[k] = np.dot(jg[1 : k + 1], f[k - 1 :: -1][:k]) / k
    return Jet(f)


def jet_pow_int(x: Jet, p: int) -> Jet:
    x = _check_jet(x)
    if int(p) != p:
        raise TypeError("jet_pow_int needs an integer exponent")
    p = int(p)
    if p < 0:
        return jet_div(Jet.constant(1.0, x.order), jet_pow_int(x, -p))
    out = Jet.constant(1.0, x.order)
    base = x
    while p:
        if p & 1:
            out = out * base
        base = base * base
        p >>= 1
    return out


def jet_derivatives(f: Callable[[Jet], Jet], at, upto: int) -> list[complex]:
    """Return ``(f(at), f'(at), ..., f^(upto)(at))``."""
    result = f(Jet.variable(complex(at), upto))
    if not isinstance(result, Jet):
        return [complex(result)] + [0j] * upto
    return result.derivatives()


def sinh(x):
    return jet_sinh(x) if isinstance(x, Jet) else cmath.sinh(x)


def cosh(x):
    return jet_cosh(x) if isinstance(x, Jet) else cmath.cosh(x)


def exp(x):
    return jet_exp(x) if isinstance(x, Jet) else cmath.exp(x)


def value_of(x) -> complex:
    """Constant term of a jet, or the number itself."""
    return x.value if isinstance(x, Jet) else complex(x)


def lu_determinant(m) -> complex:
    """Determinant by LU factorisation with partial pivoting."""
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"determinant needs a square matrix, got shape {a.shape}")
    if a.shape[0] == 0:
        return 1.0 + 0j
    return complex(kernels.lu_det(np.ascontiguousarray(a)))


def kron(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionError("kron expects two matrices")
    m, n = a.shape
    p, q = b.shape
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(m * p, n * q)


def kron_all(mats: Sequence) -> np.ndarray:
    out = np.asarray(mats[0])
    for m in mats[1:]:
        out = kron(out, m)
    return out
