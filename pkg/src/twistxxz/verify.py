"""Randomized determinant-vs-oracle and algebraic-identity checks.

Every trial draws its own generator from ``(seed, trial)`` so any failing case
can be replayed alone; results are reported in trial order regardless of how
many worker threads ran them.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import detforms, oracle
from .bae import SolverConfig, solve_bae
from .errors import SingularError
from .model import ChainParams, RootSet

SUITES = ("algebra", "scalar", "ff", "cf")
MAX_SITES = 6
THETA_BOX = 0.3

TOLERANCES = {
    "yang_baxter": 1e-12,
    "rtt": 1e-10,
    "commuting_transfer": 1e-10,
    "product_identity": 1e-10,
    "reconstruction": 1e-8,
    "hamiltonian_log_derivative": 1e-6,
    "scalar_offshell": 1e-7,
    "scalar_offshell_sum": 1e-9,
    "scalar_onshell_left": 1e-7,
    "scalar_onshell_left_sum": 1e-9,
    "scalar_onshell_right": 1e-7,
    "sminus": 1e-7,
    "c_element": 1e-7,
    "c_element_sum": 1e-9,
    "sz": 1e-7,
    "sz_u_corner": 1e-7,
    "sminus_sminus": 1e-7,
    "cc_element": 1e-7,
    "cc_element_sum": 1e-9,
    "sz_sz": 1e-6,
}


@dataclass
class CheckResult:
    name: str
    tol: float
    max_error: float = 0.0
    count: int = 0
    worst_case: dict | None = None

    @property
    def passed(self) -> bool:
        return self.count > 0 and self.max_error <= self.tol

    def update(self, err: float, case: dict):
        self.count += 1
        # written so that nan counts as worse than anything seen so far
        if self.worst_case is None or not err <= self.max_error:
            self.max_error = err if np.isfinite(err) else float("inf")
            self.worst_case = dict(case, rel_error=err)


@dataclass
class VerifyReport:
    n_sites: int
    trials: int
    seed: int
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks.values() if not c.passed]


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def random_thetas(rng, n: int, box: float = THETA_BOX) -> tuple:
    while True:
        th = tuple(complex(x, y) for x, y in rng.uniform(-box, box, size=(n, 2)))
        p = ChainParams(n, 1.0, th)
        if not p.degeneracies(1e-6):
            return th


def _cjson(z) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _case(p: ChainParams, trial: int, seed: int, **kw) -> dict:
    out = {
        "trial": trial,
        "seed": seed,
        "n_sites": p.n_sites,
        "eta": _cjson(p.eta),
        "thetas": [_cjson(t) for t in p.thetas],
    }
    for k, v in kw.items():
        if isinstance(v, (RootSet, tuple, list, np.ndarray)):
            v = [_cjson(z) for z in (v.roots if isinstance(v, RootSet) else v)]
        out[k] = v
    return out


def _algebra(p: ChainParams, rng, case):
    u, v = (complex(*rng.uniform(-0.5, 0.5, 2)) for _ in range(2))
    c = case(u=_cjson(u), v=_cjson(v))
    yield "yang_baxter", oracle.yang_baxter_residual(u, v, p.eta), c
    yield "rtt", oracle.rtt_residual(p, u, v), c
    yield "commuting_transfer", oracle.commutator_residual(p, u, v), c
    for i in range(1, p.n_sites + 1):
        rep = oracle.local_op_reconstruction_check(p, i)
        yield "product_identity", max(rep.product_identity, rep.square_identity), case(site=i)
        yield "reconstruction", max(rep.sminus, rep.splus, rep.sz), case(site=i)


def _pick_pair(p, rng, sols):
    a = sols[int(rng.integers(len(sols)))]
    b = sols[int(rng.integers(len(sols)))]
    return a, b


def _rel(p, value, ref_ops, left, right):
    ref = oracle.direct_expectation(p, left, right, ref_ops)
    return abs(value - ref) / oracle.oracle_scale(p, left, right, ref_ops)


def _rel_pair(p, a, b, left, right):
    return abs(a - b) / oracle.oracle_scale(p, left, right)


def _offshell_roots(rng, n):
    return tuple(complex(x, y) for x, y in rng.uniform(-0.6, 0.6, size=(n, 2)))


def _scalar(p, rng, sols, case):
    U, L = _offshell_roots(rng, p.n_sites), _offshell_roots(rng, p.n_sites)
    a, b = _pick_pair(p, rng, sols)
    c = case(left=U, right=L)
    det = detforms.scalar_product_offshell(p, U, L)
    yield "scalar_offshell", _rel(p, det, (), U, L), c
    yield "scalar_offshell_sum", _rel_pair(p, detforms.scalar_product_sum(p, U, L), det, U, L), c
    c = case(left=a, right=L)
    det = detforms.scalar_product_onshell_left(p, a, L)
    yield "scalar_onshell_left", _rel(p, det, (), a, L), c
    yield "scalar_onshell_left_sum", _rel_pair(p, detforms.scalar_product_onshell_left_sum(p, a, L), det, a, L), c
    c = case(left=U, right=b)
    yield "scalar_onshell_right", _rel(p, detforms.scalar_product_onshell_right(p, U, b), (), U, b), c


def _ff(p, rng, sols, case):
    a, b = _pick_pair(p, rng, sols)
    for i in range(1, p.n_sites + 1):
        c = case(left=a, right=b, site=i)
        yield "sminus", _rel(p, detforms.ff_sigma_minus(p, a, b, i), [("sminus", i)], a, b), c
        cel = detforms.c_element(p, a, b, i)
        yield "c_element", _rel(p, cel, [("C", p.thetas[i - 1])], a, b), c
        yield "c_element_sum", _rel_pair(p, detforms.c_element_sum(p, a, b, i), cel, a, b), c
        yield "sz", _rel(p, detforms.ff_sigma_z(p, a, b, i), [("sz", i)], a, b), c
        yield "sz_u_corner", _rel(p, detforms.ff_sigma_z(p, a, b, i, corner="u"), [("sz", i)], a, b), c


def _cf(p, rng, sols, case):
    a, b = _pick_pair(p, rng, sols)
    th = p.thetas
    for i in range(2, p.n_sites + 1):
        c = case(left=a, right=b, site=i)
        ops = [("sminus", i - 1), ("sminus", i)]
        yield "sminus_sminus", _rel(p, detforms.cf_minus_minus(p, a, b, i), ops, a, b), c
        cc = detforms.cc_element(p, a, b, i)
        yield "cc_element", _rel(p, cc, [("C", th[i - 2]), ("C", th[i - 1])], a, b), c
        yield "cc_element_sum", _rel_pair(p, detforms.cc_element_sum(p, a, b, i), cc, a, b), c
        ops = [("sz", i - 1), ("sz", i)]
        yield "sz_sz", _rel(p, detforms.cf_zz(p, a, b, i), ops, a, b), c


def run_trial(n: int, trial: int, seed: int, suites, eta=1.0, starts: int = 60):
    """All checks of one trial as a list of (name, error, case)."""
    rng = trial_rng(seed, trial)
    p = ChainParams(n, eta, random_thetas(rng, n))

    def case(**kw):
        return _case(p, trial, seed, **kw)

    out = []
    if "algebra" in suites:
        out += list(_algebra(p, rng, case))
    need_roots = [s for s in ("scalar", "ff", "cf") if s in suites and not (s == "cf" and n < 2)]
    if need_roots:
        sols = solve_bae(p, SolverConfig(n_starts=starts, seed=int(rng.integers(2**31))))
        if not sols:
            out.append(("bae_solutions", float("inf"), case()))
            return out
        for s in need_roots:
            gen = {"scalar": _scalar, "ff": _ff, "cf": _cf}[s]
            try:
                out += list(gen(p, rng, sols, case))
            except SingularError as exc:
                out.append((f"{s}_singular", float("inf"), case(error=str(exc))))
    return out


def run(n: int, trials: int, seed: int, suites=SUITES, jobs: int = 1, eta=1.0) -> VerifyReport:
    if not 1 <= n <= MAX_SITES:
        raise ValueError(f"verify supports 1 <= N <= {MAX_SITES}")
    suites = tuple(SUITES if suites in ("all", None) else ([suites] if isinstance(suites, str) else suites))
    unknown = set(suites) - set(SUITES)
    if unknown:
        raise ValueError(f"unknown suites {sorted(unknown)}")
    report = VerifyReport(n, trials, seed)
    if "algebra" in suites and n >= 2:
        H = oracle.hamiltonian(n, eta)
        err = float(np.abs(oracle.hamiltonian_from_transfer(n, eta) - H).max())
        _record(report, "hamiltonian_log_derivative", err, {"n_sites": n, "eta": _cjson(eta)})

    def task(t):
        return run_trial(n, t, seed, suites, eta)

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            results = list(ex.map(task, range(trials)))
    else:
        results = [task(t) for t in range(trials)]
    for per_trial in results:
        for name, err, case in per_trial:
            _record(report, name, err, case)
    return report


def _record(report: VerifyReport, name: str, err: float, case: dict):
    chk = report.checks.get(name)
    if chk is None:
        chk = report.checks[name] = CheckResult(name, TOLERANCES.get(name, 0.0))
    chk.update(float(err), case)
