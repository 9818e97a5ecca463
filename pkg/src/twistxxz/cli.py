"""Command-line entry point: solve, eval, verify, tables."""

from __future__ import annotations

import argparse
import json
import sys

from . import detforms, homolimit, model, tables, verify
from .bae import SolverConfig, certify, coverage_report, solve_bae
from .errors import OnShellError, OracleSizeError, SingularError
from .model import ChainParams, RootSet

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_NO_SOLUTION = 2
EXIT_OFF_SHELL = 3
EXIT_USAGE = 64

ORACLE_CERT_MAX_SITES = 8


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _complex_pair(text: str) -> complex:
    """'RE' or 'RE,IM'."""
    parts = text.split(",")
    if len(parts) > 2:
        raise argparse.ArgumentTypeError(f"expected RE or RE,IM, got {text!r}")
    try:
        vals = [float(x) for x in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected RE or RE,IM, got {text!r}") from None
    return complex(vals[0], vals[1] if len(vals) == 2 else 0.0)


def _complex_list(text: str) -> tuple:
    """Comma-separated Python complex literals, e.g. '0.1,0.2+0.05j,-0.1'."""
    try:
        return tuple(complex(x.strip().replace(" ", "")) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad complex list {text!r}") from None


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _g(z) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.15g}"
    return f"{z.real:.15g}{z.imag:+.15g}j"


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# solve


def cmd_solve(args) -> int:
    p = ChainParams(args.sites, args.eta, args.theta or ())
    cfg = SolverConfig(n_starts=args.starts, seed=args.seed, tol=args.tol, jobs=args.jobs)
    sols = solve_bae(p, cfg)
    print(f"found {len(sols)} root set(s) for N={p.n_sites}, eta={_g(p.eta)}")
    for k, rs in enumerate(sols, start=1):
        roots = ", ".join(_g(z) for z in rs.roots)
        print(f"  [{k}] residual {rs.residual:.3e}  roots: {roots}")
    if sols and p.n_sites <= ORACLE_CERT_MAX_SITES and not args.no_oracle:
        rep = coverage_report(p, sols)
        e_worst, l_worst = rep.worst()
        msg = (
            f"oracle: {len(rep.covered)}/{rep.n_functions} transfer-matrix eigenvalues matched, "
            f"max Lambda distance {l_worst:.2e}"
        )
        if p.is_homogeneous and p.n_sites >= 2:
            msg += f", max energy distance {e_worst:.2e}"
        print(msg)
    if args.out:
        model.dump_rootsets(sols, args.out)
        print(f"wrote {args.out}")
    return EXIT_OK if sols else EXIT_NO_SOLUTION


# ---------------------------------------------------------------------------
# eval

KIND_MAP = {"sminus": "sminus", "sz": "sz", "mm": "sminus_sminus", "zz": "sz_sz"}


def _load_one(path) -> RootSet:
    sets = model.load_rootsets(path)
    if not sets:
        raise UsageError(f"{path} holds no root sets")
    return sets[0]


def _eval_params(args, left: RootSet, right: RootSet, homogeneous: bool) -> ChainParams:
    n = len(left)
    if len(right) != n:
        raise UsageError("left and right root sets have different sizes")
    if args.sites is not None and args.sites != n:
        raise UsageError(f"--sites {args.sites} does not match the {n} roots in the files")
    eta = args.eta if args.eta is not None else (left.eta if left.eta is not None else right.eta)
    if eta is None:
        raise UsageError("no eta given and none stored in the root files")
    if homogeneous:
        return ChainParams.homogeneous(n, eta)
    th = args.theta or left.thetas or right.thetas
    if th is None:
        raise UsageError("--method inhomogeneous needs --theta (or thetas in the root files)")
    return ChainParams(n, eta, th)


def _inhomogeneous(kind, p, U, L, site):
    if kind == "scalar":
        return detforms.scalar_product_offshell(p, U, L)
    return detforms.evaluate(detforms.FormFactorRequest(p, RootSet(U), RootSet(L), site, KIND_MAP[kind]))


def _check_site(kind, site, n):
    lo = 2 if kind in ("mm", "zz") else 1
    if kind != "scalar" and not lo <= site <= n:
        raise UsageError(f"--site must lie in {lo}..{n} for --kind {kind}")


def cmd_eval(args) -> int:
    left, right = _load_one(args.left), _load_one(args.right)
    method = args.method
    p = _eval_params(args, left, right, method != "inhomogeneous")
    n = p.n_sites
    site = args.site if args.site is not None else (2 if args.kind in ("mm", "zz") else 1)
    _check_site(args.kind, site, n)
    U, L = left.roots, right.roots
    # re-certify whatever the files claim
    cu, cl = certify(p, U), certify(p, L)
    residuals = {"left": cu.residual, "right": cl.residual}
    if args.kind != "scalar":
        bad = {k: r for k, r in residuals.items() if not r <= detforms.ON_SHELL_TOL}
        if bad:
            _emit({"error": "off-shell", "tolerance": detforms.ON_SHELL_TOL, "residuals": residuals})
            return EXIT_OFF_SHELL
    eta = p.eta
    extra = {}
    if method == "inhomogeneous":
        value = _inhomogeneous(args.kind, p, U, L, site)
        label = "inhomogeneous"
    elif method == "jet" and not (args.kind == "zz" and n > 2):
        fn = {
            "scalar": lambda: homolimit.homogeneous_scalar_product(U, L, eta),
            "sminus": lambda: homolimit.homogeneous_ff_sminus(U, L, eta, site),
            "sz": lambda: homolimit.homogeneous_ff_sz(U, L, eta, site),
            "mm": lambda: homolimit.homogeneous_cf_mm(U, L, eta, site),
            "zz": lambda: homolimit.homogeneous_cf_zz_n2(U, L, eta),
        }[args.kind]
        value = fn()
        label = "jet"
    else:
        ext = homolimit.epsilon_limit(
            lambda q, u, l: _inhomogeneous(args.kind, q, u, l, site), U, L, eta, track=args.kind != "scalar"
        )
        value = ext.value
        label = "epsilon-extrapolation"
        extra = {"error_estimate": ext.error, "eps": list(ext.eps)}
    rec = detforms.result_record(args.kind, site, value, p, cu, cl, method=label, residuals=residuals, **extra)
    rec["value_text"] = _g(value)
    _emit(rec, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    if args.sites > verify.MAX_SITES:
        raise UsageError(f"--sites is capped at {verify.MAX_SITES} for the oracle suites")
    rep = verify.run(args.sites, args.trials, args.seed, args.suite, jobs=args.jobs, eta=args.eta)
    print(f"verify N={rep.n_sites} trials={rep.trials} seed={rep.seed} suite={args.suite}")
    for c in rep.checks.values():
        flag = "ok  " if c.passed else "FAIL"
        print(f"  {flag} {c.name:28s} max rel err {c.max_error:.3e}  (tol {c.tol:.0e}, {c.count} checks)")
    for c in rep.failures():
        print(f"failing case for {c.name}:")
        print(json.dumps(c.worst_case, indent=2, default=str))
    return EXIT_OK if rep.ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# tables


def cmd_tables(args) -> int:
    built = tables.build(args.which, args.eta, args.sites)
    if args.format == "json":
        text = json.dumps(tables.to_json(built), indent=2) + "\n"
    else:
        text = tables.to_csv(built)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    worst = tables.max_disagreement(built)
    if worst > tables.AGREEMENT_TOL:
        print(f"definition and formula disagree by {worst:.3e}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="twistxxz", description="Twisted XXZ chain: Bethe roots and determinant formulas.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve the Bethe equations by multi-start Newton")
    s.add_argument("--sites", type=_positive_int, required=True)
    s.add_argument("--eta", type=_complex_pair, required=True, help="RE or RE,IM")
    s.add_argument("--theta", type=_complex_list, help="comma-separated inhomogeneities")
    s.add_argument("--starts", type=_positive_int, default=200)
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--jobs", type=_positive_int, default=1)
    s.add_argument("--out")
    s.add_argument("--no-oracle", action="store_true", help="skip the brute-force spectrum check")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("eval", help="evaluate a scalar product, form factor or correlator")
    e.add_argument("--kind", choices=("scalar", "sminus", "sz", "mm", "zz"), required=True)
    e.add_argument("--left", required=True, help="root-set JSON for the left state")
    e.add_argument("--right", required=True, help="root-set JSON for the right state")
    e.add_argument("--site", type=_positive_int)
    e.add_argument("--method", choices=("jet", "epsilon", "inhomogeneous"), default="jet")
    e.add_argument("--theta", type=_complex_list)
    e.add_argument("--sites", type=_positive_int)
    e.add_argument("--eta", type=_complex_pair)
    e.add_argument("--out")
    e.set_defaults(func=cmd_eval)

    v = sub.add_parser("verify", help="randomized oracle and identity checks")
    v.add_argument("--sites", type=_positive_int, required=True)
    v.add_argument("--trials", type=_positive_int, default=20)
    v.add_argument("--seed", type=int, default=1)
    v.add_argument("--suite", choices=("all",) + verify.SUITES, default="all")
    v.add_argument("--eta", type=_complex_pair, default=1.0)
    v.add_argument("--jobs", type=_positive_int, default=1)
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("tables", help="recompute the benchmark tables")
    t.add_argument("--which", choices=("1", "2", "3", "4", "5", "all"), default="all")
    t.add_argument("--eta", type=_complex_pair, default=1.0)
    t.add_argument("--sites", type=_positive_int, default=3)
    t.add_argument("--format", choices=("csv", "json"), default="csv")
    t.add_argument("--out")
    t.set_defaults(func=cmd_tables)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"twistxxz: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OracleSizeError as exc:
        print(f"twistxxz: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OnShellError as exc:
        _emit({"error": "off-shell", "message": str(exc), "residual": exc.residual})
        return EXIT_OFF_SHELL
    except (SingularError, ValueError) as exc:
        print(f"twistxxz: error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
