"""Brute-force operators and states in the full 2**N dimensional space.

Site 1 is the leftmost tensor factor and ``|0>`` is the all-up basis vector
``e_0``.  Left states are covectors: every pairing here is the plain bilinear
product ``left @ op @ right`` with no complex conjugation.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np

from . import model
from .errors import OracleSizeError
from .model import ChainParams

MAX_SITES = 12
MEMORY_LIMIT_BYTES = 2 * 1024**3

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
SPLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SMINUS = np.array([[0, 0], [1, 0]], dtype=complex)
I2 = np.eye(2, dtype=complex)

LOCAL_OPS = {"sx": SX, "sy": SY, "sz": SZ, "splus": SPLUS, "sminus": SMINUS}


@dataclass(frozen=True)
class MonodromyBlocks:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    @property
    def t(self) -> np.ndarray:
        return self.B + self.C


def check_size(n: int, copies: int = 8):
    if n > MAX_SITES:
        raise OracleSizeError(f"oracle is capped at N <= {MAX_SITES}, got {n}")
    need = copies * 16 * 4**n
    if need > MEMORY_LIMIT_BYTES:
        raise OracleSizeError(f"N={n} needs about {need / 1e9:.1f} GB of dense operators")


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def vacuum(n: int) -> np.ndarray:
    v = np.zeros(2**n, dtype=complex)
    v[0] = 1.0
    return v


def r_matrix(u, eta) -> np.ndarray:
    se = cmath.sinh(eta)
    a = cmath.sinh(u + eta) / se
    b = cmath.sinh(u) / se
    return np.array(
        [[a, 0, 0, 0], [0, b, 1, 0], [0, 1, b, 0], [0, 0, 0, a]], dtype=complex
    )


def embed(op, site: int, n: int) -> np.ndarray:
    """Single-site operator acting on ``site`` (1-based) of an n-site chain."""
    if not 1 <= site <= n:
        raise ValueError(f"site {site} outside 1..{n}")
    check_size(n)
    left = np.eye(2 ** (site - 1), dtype=complex)
    right = np.eye(2 ** (n - site), dtype=complex)
    return np.kron(np.kron(left, op), right)


def _z_diagonal(n: int, sites) -> np.ndarray:
    """Diagonal of sum_{k in sites} sigma^z_k as a vector."""
    bits = (np.arange(2**n)[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1
    spins = 1 - 2 * bits  # +1 for up
    idx = [s - 1 for s in sites]
    return spins[:, idx].sum(axis=1) if idx else np.zeros(2**n)


@lru_cache(maxsize=512)
def _monodromy_cached(n: int, eta: complex, thetas: tuple, u: complex):
    dim = 2**n
    # T[a, b, s_1..s_N, k]: auxiliary indices a, b; output spins; input column k
    T = np.zeros((2, 2) + (2,) * n + (dim,), dtype=complex)
    eye = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    T[0, 0] = eye
    T[1, 1] = eye
    for j in range(n):
        R = r_matrix(u - thetas[j], eta).reshape(2, 2, 2, 2)  # [a, s, c, t]
        T = np.moveaxis(T, 2 + j, 2)
        T = np.einsum("asct,cbt...->abs...", R, T)
        T = np.moveaxis(T, 2, 2 + j)
    T = np.einsum("ac,cb...->ab...", SX, T).reshape(2, 2, dim, dim)
    C, D, A, B = T[0, 0].copy(), T[0, 1].copy(), T[1, 0].copy(), T[1, 1].copy()
    return MonodromyBlocks(*(_readonly(m) for m in (A, B, C, D)))


def monodromy(p: ChainParams, u) -> MonodromyBlocks:
    check_size(p.n_sites)
    return _monodromy_cached(p.n_sites, p.eta, p.thetas, complex(u))


def transfer_matrix(p: ChainParams, u) -> np.ndarray:
    return monodromy(p, u).t


def monodromy_full(p: ChainParams, u) -> np.ndarray:
    """T(u) as a (2 * 2^N)-square matrix on auxiliary (x) quantum space."""
    m = monodromy(p, u)
    return np.block([[m.C, m.D], [m.A, m.B]])


SWAP = np.eye(4, dtype=complex)[[0, 2, 1, 3]]


def yang_baxter_residual(u, v, eta) -> float:
    """max |R12(u-v) R13(u) R23(v) - R23(v) R13(u) R12(u-v)|."""
    r12 = np.kron(r_matrix(u - v, eta), I2)
    r23 = np.kron(I2, r_matrix(v, eta))
    p23 = np.kron(I2, SWAP)
    r13 = p23 @ np.kron(r_matrix(u, eta), I2) @ p23
    return float(np.abs(r12 @ r13 @ r23 - r23 @ r13 @ r12).max())


def rtt_residual(p: ChainParams, u, v) -> float:
    """Relative max-norm residual of R12(u-v) T1(u) T2(v) = T2(v) T1(u) R12(u-v)."""
    dim = 2**p.n_sites
    Tu = monodromy_full(p, u).reshape(2, dim, 2, dim)
    Tv = monodromy_full(p, v).reshape(2, dim, 2, dim)
    # index order (aux1, aux2, quantum)
    T1 = np.einsum("aqbr,cd->acqbdr", Tu, I2).reshape(4 * dim, 4 * dim)
    T2 = np.einsum("cqdr,ab->acqbdr", Tv, I2).reshape(4 * dim, 4 * dim)
    R = np.kron(r_matrix(u - v, p.eta), np.eye(dim))
    lhs = R @ T1 @ T2
    rhs = T2 @ T1 @ R
    return float(np.abs(lhs - rhs).max() / max(np.abs(lhs).max(), 1.0))


def commutator_residual(p: ChainParams, u, v) -> float:
    """Relative max-norm of [t(u), t(v)]."""
    tu, tv = transfer_matrix(p, u), transfer_matrix(p, v)
    scale = max(np.abs(tu).max() * np.abs(tv).max(), 1.0)
    return float(np.abs(tu @ tv - tv @ tu).max() / scale)


def hamiltonian(n: int, eta) -> np.ndarray:
    if n < 2:
        raise ValueError("the Hamiltonian needs at least two sites")
    check_size(n)
    ch = cmath.cosh(eta)
    H = np.zeros((2**n, 2**n), dtype=complex)
    for j in range(1, n + 1):
        for op, cf in ((SX, 1.0), (SY, 1.0), (SZ, ch)):
            if j < n:
                nxt = embed(op, j + 1, n)
            else:
                nxt = embed(SX @ op @ SX, 1, n)
            H -= cf * embed(op, j, n) @ nxt
    return H


def hamiltonian_from_transfer(n: int, eta, step: float = 1e-5) -> np.ndarray:
    """-2 sinh(eta) t(0)^-1 t'(0) + N cosh(eta), t' by central difference."""
    p = ChainParams.homogeneous(n, eta)
    t0 = transfer_matrix(p, 0.0)
    dt = (transfer_matrix(p, step) - transfer_matrix(p, -step)) / (2 * step)
    return -2 * cmath.sinh(p.eta) * np.linalg.solve(t0, dt) + n * cmath.cosh(p.eta) * np.eye(2**n)


def sov_labels(n: int):
    return list(itertools.product((0, 1), repeat=n))


def sov_state(p: ChainParams, h, side: str = "right") -> np.ndarray:
    v = vacuum(p.n_sites)
    for j, hj in enumerate(h):
        if hj:
            m = monodromy(p, p.thetas[j])
            if side == "right":
                v = m.B @ v
            elif side == "left":
                v = v @ m.C
            else:
                raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return v


def q_integer(l: int, q) -> complex:
    if l == 0:
        return 1.0
    return (1 - q ** (2 * l)) / (1 - q**2)


def q_factorial(l: int, q) -> complex:
    out = 1.0
    for k in range(1, l + 1):
        out *= q_integer(k, q)
    return out


def ladder_operator(n: int, eta, kind: str) -> np.ndarray:
    """The lowering operator B^- (kind='B') or raising C^+ (kind='C')."""
    sign = 1 if kind == "B" else -1
    op1 = SMINUS if kind == "B" else SPLUS
    out = np.zeros((2**n, 2**n), dtype=complex)
    pref = cmath.exp((n - 1) * eta / 2)
    for l in range(1, n + 1):
        after = np.exp(sign * eta / 2 * _z_diagonal(n, range(l + 1, n + 1)))
        before = np.exp(-sign * eta / 2 * _z_diagonal(n, range(1, l)))
        out += pref * (after[:, None] * embed(op1, l, n) * before[None, :])
    return out


def _reference_homogeneous(n: int, eta, side: str) -> np.ndarray:
    q = cmath.exp(eta)
    op = ladder_operator(n, eta, "B" if side == "right" else "C")
    v = vacuum(n)
    out = v.copy()
    for l in range(1, n + 1):
        v = op @ v if side == "right" else v @ op
        out = out + v / q_factorial(l, q)
    return out


def reference_weight(p: ChainParams, h) -> complex:
    """<h|Omega> (equivalently <Omega|h>) for the inhomogeneous reference state."""
    w = 1 + 0j
    for t, hl in zip(p.thetas, h):
        if hl:
            w *= model.a_func(p, t) * cmath.exp(t)
    return w


def reference_state(p: ChainParams, side: str = "right") -> np.ndarray:
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    if p.is_homogeneous:
        return _reference_homogeneous(p.n_sites, p.eta, side)
    p.require_nondegenerate()
    out = np.zeros(2**p.n_sites, dtype=complex)
    for h in sov_labels(p.n_sites):
        out += reference_weight(p, h) / model.sov_norm_f(p, h) * sov_state(p, h, side)
    return out


def bethe_state(p: ChainParams, roots, side: str = "right") -> np.ndarray:
    v = reference_state(p, side)
    for r in model._roots(roots):
        Dm = monodromy(p, r).D
        v = Dm @ v if side == "right" else v @ Dm
    return v


@dataclass(frozen=True)
class ReconstructionReport:
    site: int
    sminus: float
    splus: float
    sz: float
    product_identity: float
    square_identity: float
    singular_site: int | None = None

    @property
    def max(self) -> float:
        return max(self.sminus, self.splus, self.sz, self.product_identity, self.square_identity)


def local_op_reconstruction_check(p: ChainParams, i: int) -> ReconstructionReport:
    """Max-norm residuals of the local-operator reconstructions at site ``i``.

    Residuals are scaled by the size of the target (1 for Pauli operators,
    prod(phi)^2 for the squared product identity).
    """
    p.require_nondegenerate()
    n = p.n_sites
    T = [transfer_matrix(p, t) for t in p.thetas]
    for j, tj in enumerate(T, start=1):
        if np.linalg.cond(tj) > 1e13:
            return ReconstructionReport(i, np.inf, np.inf, np.inf, np.inf, np.inf, singular_site=j)
    pphi = model.phi_product(p)
    prod_t = reduce(np.matmul, T)
    flip = reduce(np.matmul, [embed(SX, j, n) for j in range(1, n + 1)])
    prod_res = np.abs(prod_t - pphi * flip).max() / max(abs(pphi), 1.0)
    sq_res = np.abs(prod_t @ prod_t - pphi**2 * np.eye(2**n)).max() / max(abs(pphi) ** 2, 1.0)
    blocks = monodromy(p, p.thetas[i - 1])

    def rebuild(X):
        return pphi**-2 * reduce(np.matmul, T[: i - 1] + [X] + T[i:] + [prod_t])

    res_m = np.abs(rebuild(blocks.D) - embed(SMINUS, i, n)).max()
    res_p = np.abs(rebuild(blocks.A) - embed(SPLUS, i, n)).max()
    res_z = np.abs(rebuild(2 * blocks.C - T[i - 1]) - embed(SZ, i, n)).max()
    return ReconstructionReport(i, *(float(x) for x in (res_m, res_p, res_z, prod_res, sq_res)))


def operator(p: ChainParams, spec) -> np.ndarray:
    """Matrix for one factor: ("sminus", site) or ("A"|"B"|"C"|"D"|"t", u)."""
    name, arg = spec
    if name in LOCAL_OPS:
        return embed(LOCAL_OPS[name], int(arg), p.n_sites)
    if name in ("A", "B", "C", "D"):
        return getattr(monodromy(p, arg), name)
    if name == "t":
        return transfer_matrix(p, arg)
    raise ValueError(f"unknown operator {name!r}")


def parse_op_spec(text: str) -> list[tuple]:
    """Parse 'sminus:1*sminus:2' or 'C:0.1+0.2j' into factor tuples."""
    out = []
    for tok in text.split("*"):
        name, _, arg = tok.strip().partition(":")
        if not arg:
            raise ValueError(f"operator factor {tok!r} needs an argument")
        out.append((name, int(arg) if name in LOCAL_OPS else complex(arg.replace(" ", ""))))
    return out


def apply_ops(p: ChainParams, ops, vec: np.ndarray) -> np.ndarray:
    """Apply op_1 op_2 ... op_k to ``vec`` (rightmost factor first)."""
    if isinstance(ops, str):
        ops = parse_op_spec(ops)
    elif ops and isinstance(ops[0], str):
        ops = [tuple(ops)]
    for spec in reversed(list(ops)):
        vec = operator(p, spec) @ vec
    return vec


def direct_expectation(p: ChainParams, left, right, ops=()) -> complex:
    """<Phi{left}| op_1 ... op_k |Phi{right}> by explicit products."""
    lv = bethe_state(p, left, "left")
    rv = bethe_state(p, right, "right")
    return complex(lv @ apply_ops(p, ops, rv))


def oracle_scale(p: ChainParams, left, right, ops=()) -> float:
    """Cauchy-Schwarz bound ||<L||| * ||Op||_2 * |||R>|| for relative errors."""
    lv = bethe_state(p, left, "left")
    rv = bethe_state(p, right, "right")
    if isinstance(ops, str):
        ops = parse_op_spec(ops)
    opn = 1.0
    for spec in ops:
        opn *= np.linalg.norm(operator(p, spec), 2)
    return float(np.linalg.norm(lv) * opn * np.linalg.norm(rv))


def eigenvalue_functions(p: ChainParams, probes, seed: int = 0, tol: float = 1e-8):
    """Distinct joint eigenvalue functions of t(u) sampled at ``probes``.

    Diagonalises t at a random generic point and reads every probe off the
    same eigenbasis, so each row is one eigenvalue function.
    """
    rng = np.random.default_rng(seed)
    u0 = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
    _, V = np.linalg.eig(transfer_matrix(p, u0))
    W = np.linalg.inv(V)
    rows = np.array([np.diag(W @ transfer_matrix(p, u) @ V) for u in probes]).T
    out = []
    for r in rows:
        if not any(np.abs(r - s).max() <= tol * max(1.0, np.abs(s).max()) for s in out):
            out.append(r)
    return np.array(out)


def check_quasi_vacuum(p: ChainParams, u) -> float:
    """Largest deviation from the vacuum eigen-relations of A, D and C|0> = 0."""
    m = monodromy(p, u)
    v = vacuum(p.n_sites)
    a, d = model.a_func(p, u), model.d_func(p, u)
    return float(
        max(
            np.abs(m.A @ v - a * v).max(),
            np.abs(m.D @ v - d * v).max(),
            np.abs(m.C @ v).max(),
            np.abs(v @ m.A - a * v).max(),
            np.abs(v @ m.D - d * v).max(),
            np.abs(v @ m.B).max(),
        )
    )

