"""Benchmark command line: run a solver on a suite problem, compare methods,
or drive the primal-dual solver, emitting machine-readable CSV traces."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import problems as suite
from .exceptions import AgmsdrError
from .oracle import CountingOracle, EuclideanProx
from .primal_dual import make_entropy_dual, make_quadratic_dual, pd_solve
from .restarts import solve_sc_restart, solve_wqc
from .solvers import (
    SmoothKnownL,
    SmoothLineSearch,
    SolverConfig,
    Status,
    StronglyConvex,
    Universal,
    UniversalSC,
    solve,
)

log = logging.getLogger("agmsdr.cli")

METHODS = ("agmsdr-a", "agmsdr-ls", "agmsdr-sc", "agmsdr-sc-restart",
           "wqc-restart", "universal", "universal-sc")
PROBLEMS = ("nesterov", "maxq", "chained", "quadratic")
UNIVERSAL_METHODS = ("universal", "universal-sc")

CSV_COLUMNS = ("iter", "f", "f_y", "grad_norm", "A", "a", "beta", "h",
               "psi_min", "gap_bound", "oracle_calls", "time_s")


class UsageError(AgmsdrError):
    """Invalid run specification; maps to exit code 2."""


@dataclass
class RunSpec:
    problem: str
    method: str
    n: Optional[int] = None
    L: Optional[float] = None
    mu: Optional[float] = None
    gamma: Optional[float] = None
    eps: Optional[float] = None
    R: Optional[float] = None
    max_iter: int = 1000
    grad_tol: Optional[float] = None
    seed: int = 0
    csv_path: Optional[str] = None
    constraints_path: Optional[str] = None
    wall_time: bool = False


def build_problem(spec: RunSpec) -> suite.NamedProblem:
    if spec.problem == "nesterov":
        return suite.nesterov_worst(spec.n or 100, spec.L or 10.0)
    if spec.problem == "maxq":
        return suite.maxq(spec.n or 100)
    if spec.problem == "chained":
        return suite.chained_nonconvex(spec.n or 15)
    if spec.problem == "quadratic":
        n = spec.n or 50
        lo = spec.mu if spec.mu is not None else 1.0
        hi = spec.L if spec.L is not None else 100.0
        if not 0.0 < lo <= hi:
            raise UsageError("quadratic needs 0 < mu <= L")
        spectrum = np.linspace(lo, hi, n)
        rng = np.random.default_rng(spec.seed)
        shift = rng.standard_normal(n)
        return suite.quadratic(n, spectrum, shift)
    raise UsageError(f"unknown problem {spec.problem!r}")


def _build_config(spec: RunSpec, problem: suite.NamedProblem) -> SolverConfig:
    method = spec.method
    if method == "agmsdr-a":
        L = spec.L if spec.L is not None else problem.L
        if L is None:
            raise UsageError("agmsdr-a needs --L (or a problem with known L)")
        variant = SmoothKnownL(L)
    elif method == "agmsdr-ls":
        variant = SmoothLineSearch()
    elif method == "agmsdr-sc":
        mu = spec.mu if spec.mu is not None else problem.mu
        if mu is None:
            raise UsageError("agmsdr-sc needs --mu")
        variant = StronglyConvex(mu, spec.L)
    elif method == "universal":
        if spec.eps is None:
            raise UsageError("universal needs --eps")
        variant = Universal(spec.eps)
    elif method == "universal-sc":
        mu = spec.mu if spec.mu is not None else problem.mu
        if mu is None or spec.eps is None:
            raise UsageError("universal-sc needs --mu and --eps")
        variant = UniversalSC(mu, spec.eps)
    else:
        raise UsageError(f"method {method!r} is not a plain variant")

    target_gap = None
    if spec.R is not None and spec.eps is not None:
        # universal runs certify eps total error once the bound reaches eps/2
        target_gap = spec.eps / 2.0 if method in UNIVERSAL_METHODS else spec.eps
    return SolverConfig(variant=variant, max_iter=spec.max_iter, R=spec.R,
                        target_gap=target_gap, grad_tol=spec.grad_tol,
                        use_cubic_ray=(spec.problem == "chained"
                                       and method == "agmsdr-ls"))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def run_trace(spec: RunSpec):
    """Execute one spec; returns (rows, status, problem)."""
    problem = build_problem(spec)
    counting = CountingOracle(problem.oracle)
    prox = EuclideanProx()
    rows: list[dict] = []

    def cb(run, rec):
        rows.append({
            "iter": len(rows) + 1,
            "f": rec.f_x,
            "f_y": rec.f_y,
            "grad_norm": rec.grad_dual_norm_y,
            "A": rec.A,
            "a": rec.a,
            "beta": rec.beta,
            "h": rec.h,
            "psi_min": rec.psi_min,
            "gap_bound": rec.gap_bound,
            "oracle_calls": counting.calls,
            "time_s": rec.wall_time if spec.wall_time else None,
        })

    if spec.method == "wqc-restart":
        if spec.gamma is None:
            raise UsageError("wqc-restart needs --gamma")
        if spec.eps is None:
            raise UsageError("wqc-restart needs --eps (target accuracy)")
        if problem.f_star is None:
            raise UsageError("wqc-restart needs a problem with known f_star")
        config = SolverConfig(variant=SmoothKnownL(spec.L) if spec.L is not None
                              else SmoothLineSearch(),
                              max_iter=spec.max_iter, grad_tol=spec.grad_tol)
        report = solve_wqc(counting, prox, problem.x0, spec.gamma,
                           problem.f_star, spec.eps, config, callback=cb)
        return rows, report.status, problem
    if spec.method == "agmsdr-sc-restart":
        mu = spec.mu if spec.mu is not None else problem.mu
        if mu is None:
            raise UsageError("agmsdr-sc-restart needs --mu")
        config = SolverConfig(variant=SmoothKnownL(spec.L) if spec.L is not None
                              else SmoothLineSearch(),
                              max_iter=spec.max_iter, grad_tol=spec.grad_tol)
        report = solve_sc_restart(counting, prox, problem.x0, mu, config,
                                  target_gap=spec.eps, f_star=problem.f_star,
                                  callback=cb)
        return rows, report.status, problem

    config = _build_config(spec, problem)
    report = solve(counting, prox, config, problem.x0, callback=cb)
    return rows, report.status, problem


def _write_csv(path: str, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row.get(c)) for c in columns) + "\n")


def cmd_run(spec: RunSpec) -> int:
    rows, status, _ = run_trace(spec)
    if spec.csv_path:
        _write_csv(spec.csv_path, CSV_COLUMNS, rows)
    log.info("run finished: %s after %d iterations", status.value, len(rows))
    print(f"{spec.method} on {spec.problem}: {status.value}, "
          f"{len(rows)} iterations", file=sys.stderr)
    return 0


def cmd_compare(specs: list[RunSpec], align: str = "iterations",
                csv_path: Optional[str] = None) -> int:
    """Run several specs on the same problem and merge the traces."""
    if len(specs) < 2:
        raise UsageError("compare needs at least two methods")
    keys = {(s.problem, s.n, s.L, s.mu, s.seed) for s in specs}
    if len(keys) != 1:
        raise UsageError("compare requires identical problems across specs")
    if align not in ("iterations", "oracle_calls", "time"):
        raise UsageError(f"unknown alignment {align!r}")

    align_col = {"iterations": "iter", "oracle_calls": "oracle_calls",
                 "time": "time_s"}[align]
    merged = []
    for s in specs:
        rows, _, _ = run_trace(s)
        for r in rows:
            r["method"] = s.method
        rows.sort(key=lambda r: (r[align_col] is None, r[align_col]))
        merged.extend(rows)
    if csv_path:
        _write_csv(csv_path, ("method",) + CSV_COLUMNS, merged)
    return 0


PD_COLUMNS = ("iter", "f_hat", "phi_eta", "pd_gap", "feas_norm", "A")


def cmd_pd(spec: RunSpec) -> int:
    """Primal-dual run from a JSON constraint file."""
    if not spec.constraints_path:
        raise UsageError("pd needs --constraints FILE")
    try:
        with open(spec.constraints_path) as fh:
            data = json.load(fh)
        A = np.asarray(data["A"], dtype=float)
        b = np.asarray(data["b"], dtype=float)
        kind = data.get("kind", "quadratic")
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot parse constraint file: {exc}") from exc
    if kind == "quadratic":
        problem = make_quadratic_dual(A, b)
    elif kind == "entropy":
        problem = make_entropy_dual(A, b)
    else:
        raise UsageError(f"unknown dual kind {kind!r}")

    eps = spec.eps if spec.eps is not None else 1e-6
    report = pd_solve(problem, eps_f=eps, eps_eq=eps, max_iter=spec.max_iter)
    if spec.csv_path:
        rows = [{"iter": r.k, "f_hat": r.f_hat, "phi_eta": r.phi_eta,
                 "pd_gap": r.pd_gap, "feas_norm": r.feas_norm, "A": r.A}
                for r in report.trace]
        _write_csv(spec.csv_path, PD_COLUMNS, rows)
    msg = (f"pd ({problem.name}): {report.status.value}, "
           f"gap={report.pd_gap:.3g}, feas={report.feas_norm:.3g}")
    if report.diverged:
        msg += " [dual norm diverging; primal likely infeasible]"
    print(msg, file=sys.stderr)
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", choices=PROBLEMS)
    p.add_argument("--n", type=int)
    p.add_argument("--L", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--R", type=float)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--grad-tol", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", dest="csv_path")
    p.add_argument("--constraints", dest="constraints_path")
    p.add_argument("--wall-time", action="store_true",
                   help="fill the time_s column (off by default so traces "
                        "are byte-identical across runs)")


def _spec_from_args(args, method: Optional[str] = None) -> RunSpec:
    return RunSpec(problem=args.problem or "quadratic",
                   method=method or getattr(args, "method", None) or "agmsdr-ls",
                   n=args.n, L=args.L, mu=args.mu, gamma=args.gamma,
                   eps=args.eps, R=args.R, max_iter=args.max_iter,
                   grad_tol=args.grad_tol, seed=args.seed,
                   csv_path=args.csv_path,
                   constraints_path=args.constraints_path,
                   wall_time=args.wall_time)


def _setup_logging() -> None:
    level = os.environ.get("AGMSDR_LOG", "off").lower()
    if level == "off":
        logging.getLogger("agmsdr").addHandler(logging.NullHandler())
        return
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if level == "debug" else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[list[str]] = None) -> int:
    _setup_logging()
    parser = argparse.ArgumentParser(
        prog="agmsdr", description="accelerated line-search solver benchmark")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one method on one problem")
    p_run.add_argument("--method", choices=METHODS, required=True)
    _add_common(p_run)

    p_cmp = sub.add_parser("compare", help="run several methods on a problem")
    p_cmp.add_argument("--method", choices=METHODS, action="append",
                       required=True)
    p_cmp.add_argument("--align", default="iterations",
                       choices=("iterations", "oracle_calls", "time"))
    _add_common(p_cmp)

    p_pd = sub.add_parser("pd", help="primal-dual solve from a constraint file")
    _add_common(p_pd)

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(_spec_from_args(args))
        if args.command == "compare":
            specs = [_spec_from_args(args, method=m) for m in args.method]
            return cmd_compare(specs, args.align, args.csv_path)
        if args.command == "pd":
            return cmd_pd(_spec_from_args(args, method="universal"))
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AgmsdrError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
