"""End-to-end benchmark tables: solve, then evaluate by definition and by formula.

"definition" is the brute-force oracle value in the 2^N space; "formula" the
homogeneous determinant expression.  Intermediate quantities of the formula
appear as rows with an empty definition column.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import homolimit as hl
from . import oracle
from .bae import SolverConfig, newton, solve_bae
from .model import ChainParams, RootSet, lambda_tq

AGREEMENT_TOL = 1e-9
CSV_HEADER = ("quantity", "definition", "formula", "abs_diff")

# reference benchmark roots for eta = 1, N = 3 (used to pick the matching
# solutions out of the solver output)
BENCH_U = (
    -1.637416729786854 + 1.570796326794897j,
    -0.500000000000000 + 1.570796326794896j,
    0.637416729786854 + 1.570796326794897j,
)
BENCH_LAMBDA = (-1.431625849182040, -0.500000000000000, 0.431625849182040)


@dataclass(frozen=True)
class Row:
    quantity: str
    definition: complex | None
    formula: complex | None

    @property
    def abs_diff(self) -> float | None:
        if self.definition is None or self.formula is None:
            return None
        return abs(self.definition - self.formula)

    def cells(self) -> list[str]:
        d = self.abs_diff
        return [
            self.quantity,
            fmt(self.definition),
            fmt(self.formula),
            "" if d is None else f"{d:.14e}",
        ]

    def to_json(self) -> dict:
        def cj(z):
            return None if z is None else {"re": z.real, "im": z.imag}

        return {
            "quantity": self.quantity,
            "definition": cj(self.definition),
            "formula": cj(self.formula),
            "abs_diff": self.abs_diff,
        }


def fmt(z) -> str:
    """15 significant digits, lowercase scientific; complex as re+imj."""
    if z is None:
        return ""
    z = complex(z)
    re = z.real + 0.0
    im = z.imag + 0.0
    if im == 0.0:
        return f"{re:.14e}"
    return f"{re:.14e}{im:+.14e}j"


def _wrapped(a, b) -> float:
    d = np.asarray(a) - np.asarray(b)
    im = (d.imag + math.pi / 2) % math.pi - math.pi / 2
    return float(np.abs(d.real + 1j * im).max())


def _on_line(rs: RootSet, im: float) -> bool:
    return all(abs((z.imag - im + math.pi / 2) % math.pi - math.pi / 2) < 1e-6 for z in rs.roots)


def benchmark_roots(n: int = 3, eta=1.0, cfg: SolverConfig = SolverConfig()):
    """The (u, lambda) pair of root sets used by the tables.

    For eta = 1, N = 3 these are the solutions closest to the reference
    benchmark roots.  Otherwise lambda is a set of real roots and u a set on
    the line Im = pi/2 when such sets exist, else the first two solutions.
    """
    p = ChainParams.homogeneous(n, eta)
    sols = solve_bae(p, cfg)
    if not sols:
        raise RuntimeError("no Bethe root sets found")
    tight = SolverConfig(tol=1e-14)
    if n == 3 and complex(eta) == 1:
        pick = []
        for ref in (BENCH_U, BENCH_LAMBDA):
            best = min(sols, key=lambda s: _wrapped(s.roots, RootSet(ref).roots))
            pick.append(best)
    else:
        real = [s for s in sols if _on_line(s, 0.0)]
        line = [s for s in sols if _on_line(s, math.pi / 2)]
        lam = real[0] if real else sols[0]
        rest = [s for s in (line or sols) if s is not lam] or [lam]
        pick = [rest[0], lam]
    out = []
    for s in pick:
        x, nr, _, _ = newton(p, s.array(), tight)
        out.append(RootSet(x, nr, True, p.eta, p.thetas))
    return out[0], out[1]


def table_roots(p, U, L) -> list[Row]:
    rows = []
    for name, rs, ref in (("u", U, BENCH_U), ("lambda", L, BENCH_LAMBDA)):
        reference = p.n_sites == 3 and complex(p.eta) == 1
        for k, z in enumerate(rs.roots, start=1):
            rows.append(Row(f"{name}_{k}", z, ref[k - 1] if reference else None))
    return rows


def table_scalar(p, U, L) -> list[Row]:
    eta, n = p.eta, p.n_sites
    return [
        Row("scalar_product", oracle.direct_expectation(p, L, L), hl.homogeneous_scalar_product(L, L, eta)),
        Row("phi_1(0)", None, hl.phi_n(L, L, eta, 1, 0.0).value),
        Row("det_P_hom", None, np.linalg.det(hl.derivative_matrix(p, L.roots, L.roots))),
        Row("normalization", None, hl.normalization(n)),
    ]


def table_sz(p, U, L) -> list[Row]:
    eta = p.eta
    lam_l = lambda_tq(p, L, 0.0)
    return [
        Row("sz_1", oracle.direct_expectation(p, U, L, [("sz", 1)]), hl.homogeneous_ff_sz(U, L, eta, 1)),
        Row("phi_1(0)", None, hl.phi_n(U, L, eta, 1, 0.0).value),
        Row("xi_tilde(0)", None, hl.xi_tilde(U, L, eta, 0.0).value),
        Row("Lambda_u(0)", None, lambda_tq(p, U, 0.0)),
        Row("Lambda_lambda(0)", None, lam_l),
        Row("det_F_hom_z", None, np.linalg.det(hl.bordered_matrix(p, U.roots, L.roots, 2.0, -lam_l))),
    ]


def table_sminus(p, U, L) -> list[Row]:
    eta = p.eta
    return [
        Row("sminus_1", oracle.direct_expectation(p, U, L, [("sminus", 1)]), hl.homogeneous_ff_sminus(U, L, eta, 1)),
        Row("f_minus_1(0)", None, hl.f_minus_n(U, L, eta, 1, 0.0).value),
        Row("det_F_hom_D", None, np.linalg.det(hl.derivative_matrix(p, U.roots, L.roots, 1))),
    ]


def table_sminus_sminus(p, U, L) -> list[Row]:
    eta = p.eta
    ops = [("sminus", 1), ("sminus", 2)]
    return [
        Row("sminus_1_sminus_2", oracle.direct_expectation(p, L, L, ops), hl.homogeneous_cf_mm(L, L, eta, 2)),
        Row("f_mm_1(0)", None, hl.f_mm_n(L, L, eta, 1, 0.0).value),
        Row("det_F_hom_DD", None, np.linalg.det(hl.derivative_matrix(p, L.roots, L.roots, 2))),
    ]


BUILDERS = {
    1: table_roots,
    2: table_scalar,
    3: table_sz,
    4: table_sminus,
    5: table_sminus_sminus,
}


def build(which="all", eta=1.0, n: int = 3, cfg: SolverConfig = SolverConfig()) -> dict:
    keys = sorted(BUILDERS) if which == "all" else [int(which)]
    if any(k not in BUILDERS for k in keys):
        raise ValueError(f"table must be one of {sorted(BUILDERS)} or 'all'")
    if n < 2 and any(k == 5 for k in keys):
        raise ValueError("the two-site correlator needs N >= 2")
    p = ChainParams.homogeneous(n, eta)
    U, L = benchmark_roots(n, eta, cfg)
    return {k: BUILDERS[k](p, U, L) for k in keys}


def max_disagreement(tables: dict, skip=()) -> float:
    """Largest |definition - formula| over all rows that have both."""
    diffs = [
        r.abs_diff
        for k, rows in tables.items()
        if k not in skip
        for r in rows
        if r.abs_diff is not None
    ]
    return max(diffs, default=0.0)


def to_csv(tables: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for k in sorted(tables):
        for r in tables[k]:
            w.writerow([f"table{k}.{r.quantity}"] + r.cells()[1:])
    return buf.getvalue()


def to_json(tables: dict) -> dict:
    return {str(k): [r.to_json() for r in rows] for k, rows in sorted(tables.items())}
