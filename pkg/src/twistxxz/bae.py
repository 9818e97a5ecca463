"""Multi-start Newton solver for the Bethe equations and on-shell certification."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels, model
from .errors import OnShellError, SingularError
from .model import ChainParams, RootSet

HALF_PI = math.pi / 2
FORMS = {"plain": 0, "ad": kernels.SCALE_AD, "sep": kernels.SCALE_SEP}


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 100
    tol: float = 1e-10
    n_starts: int = 200
    seed: int = 7
    start_box: float = 2.0
    max_halvings: int = 20
    dedup_tol: float = 1e-8
    # roots closer than this to theta_k or theta_k - eta (mod i pi), or to each
    # other, mark a singular solution of the polynomial equations
    exclusion_tol: float = 1e-3
    # Newton maps run from every start: "plain" is the raw residual, "ad"
    # divides equation j by a(lam_j) d(lam_j), "sep" by the root separations
    # prod_{k != j} sinh(lam_j - lam_k).  The divided maps lose the spurious
    # zeros (roots pinned at theta_k, theta_k - eta or at each other) that
    # otherwise attract most starts.
    forms: tuple = ("ad", "sep")
    jobs: int = 1

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not self.forms or set(self.forms) - set(FORMS):
            raise ValueError(f"forms must be a non-empty subset of {tuple(FORMS)}")
        if self.n_starts < 1:
            raise ValueError("n_starts must be at least 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


@dataclass(frozen=True)
class StartResult:
    index: int
    form: str
    residual: float
    iterations: int
    status: str
    outcome: str


@dataclass
class SolveReport:
    solutions: list
    starts: list = field(default_factory=list)

    def counts(self) -> dict:
        out: dict = {}
        for s in self.starts:
            out[s.outcome] = out.get(s.outcome, 0) + 1
        return out


def bae_residual(p: ChainParams, roots) -> np.ndarray:
    x = np.asarray(model._roots(roots), dtype=complex)
    if x.size != p.n_sites:
        raise ValueError(f"need {p.n_sites} roots, got {x.size}")
    return kernels.bae_residual(x, np.asarray(p.thetas, dtype=complex), p.eta)


def bae_jacobian(p: ChainParams, roots) -> np.ndarray:
    x = np.asarray(model._roots(roots), dtype=complex)
    return kernels.bae_residual_jacobian(x, np.asarray(p.thetas, dtype=complex), p.eta)[1]


def residual_norm(p: ChainParams, roots) -> float:
    r = bae_residual(p, roots)
    return float(np.abs(r).max()) if r.size else 0.0


def fold(roots) -> np.ndarray:
    """Map imaginary parts into (-pi/2, pi/2] using sinh's i*pi periodicity."""
    x = np.asarray(roots, dtype=complex)
    im = HALF_PI - np.mod(HALF_PI - x.imag, math.pi)
    im = np.where(im <= -HALF_PI + 1e-9, im + math.pi, im)
    return x.real + 1j * im


def _wrapped_distance(a: complex, b: complex) -> float:
    z = a - b
    im = (z.imag + HALF_PI) % math.pi - HALF_PI
    return abs(complex(z.real, im))


def singular_reason(p: ChainParams, roots, tol: float) -> str | None:
    """Why a converged root set is not a physical solution, or None."""
    rs = list(model._roots(roots))
    for r in rs:
        for k, t in enumerate(p.thetas, start=1):
            if _wrapped_distance(r, t) < tol:
                return f"root {r:.6g} at theta_{k}"
            if _wrapped_distance(r, t - p.eta) < tol:
                return f"root {r:.6g} at theta_{k} - eta"
    for i in range(len(rs)):
        for j in range(i):
            if _wrapped_distance(rs[i], rs[j]) < tol:
                return "coincident roots"
    return None


def certify(p: ChainParams, roots, tol: float = 1e-8) -> RootSet:
    """Attach the residual and on-shell flag to a candidate root set."""
    rs = model._roots(roots)
    res = residual_norm(p, rs)
    return RootSet(rs, res, bool(res <= tol), p.eta, p.thetas)


def require_on_shell(p: ChainParams, roots, tol: float = 1e-8, label: str = "roots") -> RootSet:
    rs = certify(p, roots, tol)
    if not rs.on_shell:
        raise OnShellError(f"{label} are off-shell: residual {rs.residual:.3e} > {tol:.1e}", rs.residual)
    return rs


def newton(p: ChainParams, x0, cfg: SolverConfig, form: str = "plain"):
    """One damped Newton run; the returned residual is always the raw one."""
    x, nr, it, status = kernels.newton_bae(
        np.asarray(x0, dtype=complex),
        np.asarray(p.thetas, dtype=complex),
        p.eta,
        cfg.max_iters,
        cfg.tol,
        cfg.max_halvings,
        FORMS[form],
    )
    x = np.asarray(x)
    if status == kernels.CONVERGED and form != "plain":
        nr = residual_norm(p, x)
    return x, float(nr), int(it), kernels.STATUS_NAMES[status]


def _starts(p: ChainParams, cfg: SolverConfig) -> np.ndarray:
    rng = np.random.default_rng(cfg.seed)
    n = p.n_sites
    re = rng.uniform(-cfg.start_box, cfg.start_box, size=(cfg.n_starts, n))
    im = rng.uniform(-HALF_PI, HALF_PI, size=(cfg.n_starts, n))
    return re + 1j * im


def _one_form(p, cfg, k, x0, form):
    x, nr, it, status = newton(p, x0, cfg, form)
    if status != "converged" or not nr <= cfg.tol:
        return None, StartResult(k, form, nr, it, status, "not-converged")
    x = fold(x)
    if residual_norm(p, x) > cfg.tol:
        return None, StartResult(k, form, nr, it, status, "fold-recheck-failed")
    if singular_reason(p, x, cfg.exclusion_tol):
        return None, StartResult(k, form, nr, it, status, "singular")
    return model.canonical_order(x), StartResult(k, form, nr, it, status, "accepted")


def _run_start(args):
    p, cfg, k, x0 = args
    return [_one_form(p, cfg, k, x0, form) for form in cfg.forms]


def solve_bae_report(p: ChainParams, cfg: SolverConfig = SolverConfig()) -> SolveReport:
    starts = _starts(p, cfg)
    tasks = [(p, cfg, k, x0) for k, x0 in enumerate(starts)]
    if cfg.jobs > 1:
        with ThreadPoolExecutor(cfg.jobs) as ex:
            results = list(ex.map(_run_start, tasks))
    else:
        results = [_run_start(t) for t in tasks]
    results = [r for per_start in results for r in per_start]
    found = sorted(
        (x for x, _ in results if x is not None),
        key=lambda xs: [(round(z.imag, 9), z.real) for z in xs],
    )
    unique: list[tuple] = []
    for x in found:
        if not any(np.abs(np.subtract(x, y)).max() < cfg.dedup_tol for y in unique):
            unique.append(x)
    sols = [RootSet(x, residual_norm(p, x), True, p.eta, p.thetas) for x in unique]
    return SolveReport(sols, [s for _, s in results])


def solve_bae(p: ChainParams, cfg: SolverConfig = SolverConfig()) -> list[RootSet]:
    return solve_bae_report(p, cfg).solutions


def continue_roots(p_path, roots, cfg: SolverConfig = SolverConfig()) -> list[RootSet]:
    """Track a solution along a sequence of parameter sets by warm-started Newton."""
    x = np.asarray(model._roots(roots), dtype=complex)
    out = []
    for p in p_path:
        x, nr, _, status = newton(p, x, cfg)
        if status != "converged":
            x, nr, _, status = newton(p, out[-1].array() if out else x, cfg, "ad")
        if status != "converged":
            raise OnShellError(f"continuation lost the solution (residual {nr:.3e}, {status})", nr)
        out.append(RootSet(x, nr, True, p.eta, p.thetas))
    return out


@dataclass(frozen=True)
class CoverageEntry:
    roots: RootSet
    energy_distance: float | None
    lambda_distance: float
    function_index: int


@dataclass
class CoverageReport:
    entries: list
    n_functions: int
    probes: tuple

    @property
    def covered(self) -> set:
        return {e.function_index for e in self.entries}

    def worst(self) -> tuple[float, float]:
        ed = [e.energy_distance for e in self.entries if e.energy_distance is not None]
        ld = [e.lambda_distance for e in self.entries]
        return (max(ed) if ed else 0.0, max(ld) if ld else 0.0)


DEFAULT_PROBES = (0.1 + 0.05j, -0.4 + 0.3j, 0.7 - 0.2j)


def coverage_report(p: ChainParams, sets, probes=DEFAULT_PROBES) -> CoverageReport:
    """Match each root set to the oracle spectrum (energy and eigenvalue function)."""
    from . import oracle

    funcs = oracle.eigenvalue_functions(p, probes)
    evals = None
    if p.is_homogeneous and p.n_sites >= 2:
        evals = np.linalg.eigvals(oracle.hamiltonian(p.n_sites, p.eta))
    entries = []
    for rs in sets:
        lam = np.array([model.lambda_tq(p, rs, u) for u in probes])
        dist = np.abs(funcs - lam[None, :]).max(axis=1)
        k = int(np.argmin(dist))
        ed = None
        if evals is not None:
            try:
                ed = float(np.abs(evals - model.energy(rs, p.eta, p.n_sites)).min())
            except SingularError:
                ed = math.inf
        entries.append(CoverageEntry(rs, ed, float(dist[k]), k))
    return CoverageReport(entries, len(funcs), tuple(probes))


def lambda_analyticity(p: ChainParams, roots, delta: float = 1e-4) -> float:
    """Largest residue of Lambda at the roots, estimated from a two-sided probe.

    A pole of residue R makes Lambda(r + delta) - Lambda(r - delta) = 2R/delta,
    while a regular point gives 2 delta Lambda'(r); delta/2 times the jump is R
    up to O(delta**2).  Small for on-shell roots.
    """
    worst = 0.0
    for r in model._roots(roots):
        lo = model.lambda_tq(p, roots, r - delta)
        hi = model.lambda_tq(p, roots, r + delta)
        worst = max(worst, 0.5 * delta * abs(hi - lo))
    return worst
