"""Command line: ``uqp gen | solve | bench | caf``.

Exit codes: 0 success, 1 runtime or validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .caf import caf_synthesize, write_outputs
from .linalg import load_matrix, quadratic_form, save_matrix
from .local import LocalConfig, local_optimize
from .merit import MeritConfig, merit, report_to_json
from .oracle import brute_force, refine
from .scenarios import (
    ClutterParams,
    RandomSpec,
    clutter_case,
    crlb_matrix,
    random_hermitian,
    snr_matrix,
    steering,
    theorem2_construct,
)

SCENARIOS = ("random", "rankdef", "case1", "case2", "case3", "theorem2")
BENCH_FIELDS = ["n", "scenario", "rank_or_case", "trials", "count_gamma_one", "avg_gamma", "min_gamma", "avg_seconds"]


class UsageError(Exception):
    pass


# -- gen ------------------------------------------------------------------------


def build_matrix(scenario: str, n: int, *, rank=None, eta=None, doppler=None, seed: int = 0,
                 target: str = "snr") -> np.ndarray:
    """Matrix for a named scenario (shared by ``gen`` and ``bench``).

    ``random`` is full rank (``d = n``); ``rankdef`` needs ``rank``.  The
    clutter cases return ``M`` itself for ``target="M"``, otherwise the SNR
    or CRLB matrix built from it with the steering vector of ``doppler``.
    ``theorem2`` builds a matrix whose optimum is a seeded random unimodular
    vector with top eigenvalue 2 and the others uniform in ``[0, 1)``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if scenario == "random":
        return random_hermitian(RandomSpec(n, n if rank is None else rank, seed))
    if scenario == "rankdef":
        if rank is None:
            raise ValueError("rankdef needs --rank")
        if not 1 <= rank <= n:
            raise ValueError(f"rank must lie in [1, n], got {rank}")
        return random_hermitian(RandomSpec(n, rank, seed))
    if scenario.startswith("case"):
        which = int(scenario[4:])
        kw = {}
        if eta is not None:
            kw["eta" if which == 1 else "eta1"] = eta
        if doppler is not None:
            kw["target_doppler"] = doppler
        params = ClutterParams(**kw)
        M = clutter_case(which, n, params)
        if target == "M":
            return M
        p = steering(n, params.target_doppler)
        return snr_matrix(M, p) if target == "snr" else crlb_matrix(M, p, params.T_r)
    if scenario == "theorem2":
        rng = np.random.default_rng(seed)
        s = rng.uniform(0.0, 2.0 * np.pi, n)
        sigma = np.concatenate([[2.0], np.sort(rng.uniform(0.0, 1.0, n - 1))[::-1]])
        return theorem2_construct([s], sigma)
    raise ValueError(f"unknown scenario {scenario!r}")


def cmd_gen(args) -> int:
    R = build_matrix(args.scenario, args.n, rank=args.rank, eta=args.eta, doppler=args.doppler,
                     seed=args.seed, target=args.target)
    save_matrix(args.out, R)
    return 0


# -- solve -----------------------------------------------------------------------


def _merit_cfg(args, seed: int) -> MeritConfig:
    return MeritConfig(eps0=args.eps, delta=args.delta, delta0=args.delta0, restarts=args.restarts, seed=seed)


def solve_matrix(R: np.ndarray, method: str, seed: int, *, m: int = 16, cfg: MeritConfig | None = None,
                 timing: bool = True) -> dict:
    """Run one solver and return the report document."""
    n = R.shape[0]
    t0 = time.perf_counter()
    if method == "merit":
        rep = merit(R, cfg or MeritConfig(seed=seed))
        doc = report_to_json(rep, method=method, n=n, seed=seed)
    elif method == "local":
        s0 = np.random.default_rng(seed).uniform(0.0, 2.0 * np.pi, n)
        phases, trace = local_optimize(R, s0, LocalConfig())
        doc = report_to_json(None, method=method, n=n, seed=seed, objective=quadratic_form(R, phases), s=phases,
                             outer_iterations=trace.iterations, converged=trace.converged)
    elif method == "oracle":
        res = brute_force(R, m)
        phases, value = refine(R, res)
        doc = report_to_json(None, method=method, n=n, seed=seed, objective=res.value, s=res.s,
                             outer_iterations=res.evaluations, converged=True, m=m,
                             refined_objective=value, refined_s_phases=[float(p) for p in phases])
    else:
        raise ValueError(f"unknown method {method!r}")
    doc["elapsed_ms"] = (time.perf_counter() - t0) * 1e3 if timing else None
    return doc


def cmd_solve(args) -> int:
    R = load_matrix(args.matrix)
    if args.method == "oracle" and args.m is None:
        raise UsageError("--method oracle requires --m")
    doc = solve_matrix(R, args.method, args.seed, m=args.m or 16, cfg=_merit_cfg(args, args.seed),
                       timing=not args.no_timing)
    if args.reference:
        ref = json.loads(Path(args.reference).read_text())
        phases = np.asarray(ref["s_phases"] if isinstance(ref, dict) else ref, dtype=float)
        doc["reference_objective"] = quadratic_form(R, phases)
    _write_json(args.out, doc)
    return 0


# -- bench ---------------------------------------------------------------------------


def _bench_trial(task) -> dict:
    scenario, n, rank, trial, seed, eps, timing = task
    if scenario.startswith("case"):
        # fixed matrix, one random initialization per trial
        R = build_matrix(scenario, n)
        solve_seed = seed + trial
    else:
        R = build_matrix(scenario, n, rank=rank, seed=seed + trial)
        solve_seed = seed + trial
    doc = solve_matrix(R, "merit", solve_seed, cfg=MeritConfig(eps0=eps, seed=solve_seed), timing=timing)
    doc.update(scenario=scenario, trial=trial, rank=rank)
    return doc


def bench_rows(scenario: str, n_list, trials: int, seed: int, *, rank=None, eps: float = 1e-9, jobs: int = 1,
               timing: bool = True) -> tuple[list, list]:
    """Per-(n, scenario) summary rows plus the per-trial report documents."""
    rows, reports = [], []
    for n in n_list:
        tasks = [(scenario, n, rank, t, seed, eps, timing) for t in range(trials)]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                docs = list(pool.map(_bench_trial, tasks))
        else:
            docs = [_bench_trial(t) for t in tasks]
        gammas = [d["gamma"] for d in docs]
        secs = [d["elapsed_ms"] / 1e3 for d in docs] if timing else None
        rows.append({
            "n": n,
            "scenario": scenario,
            "rank_or_case": scenario[4:] if scenario.startswith("case") else (rank if rank is not None else n),
            "trials": trials,
            "count_gamma_one": sum(g == 1.0 for g in gammas),
            "avg_gamma": float(np.mean(gammas)),
            "min_gamma": float(np.min(gammas)),
            "avg_seconds": float(np.mean(secs)) if timing else "",
        })
        reports.extend(docs)
    return rows, reports


def cmd_bench(args) -> int:
    try:
        n_list = [int(v) for v in args.n_list.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"--n-list must be comma-separated integers: {exc}") from exc
    if not n_list or args.trials < 1:
        raise ValueError("need at least one n and one trial")
    if args.scenario == "rankdef" and args.rank is None:
        raise ValueError("rankdef needs --rank")
    rows, reports = bench_rows(args.scenario, n_list, args.trials, args.seed, rank=args.rank, eps=args.eps,
                               jobs=args.jobs, timing=not args.no_timing)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        wr = csv.DictWriter(fh, fieldnames=BENCH_FIELDS, lineterminator="\n")
        wr.writeheader()
        wr.writerows(rows)
    _write_json(out.with_name(out.stem + "_reports.json"), reports)
    return 0


# -- caf ------------------------------------------------------------------------------


def cmd_caf(args) -> int:
    res = caf_synthesize(args.n, args.tau_grid, args.f_grid, args.iters, args.solver)
    write_outputs(res, args.out, iterations=args.iters, solver=args.solver)
    return 0


# -- plumbing ------------------------------------------------------------------------


def _write_json(path, doc) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="uqp", description="Unimodular quadratic programming toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a matrix file")
    g.add_argument("--scenario", choices=SCENARIOS, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--rank", type=int)
    g.add_argument("--eta", type=float, help="case1 eta or case2 eta1")
    g.add_argument("--doppler", type=float, help="normalized target Doppler of the steering vector")
    g.add_argument("--target", choices=("M", "snr", "crlb"), default="M",
                   help="for case scenarios: disturbance M (default) or the SNR/CRLB matrix")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve the UQP of a matrix file")
    s.add_argument("--matrix", required=True)
    s.add_argument("--method", choices=("merit", "local", "oracle"), default="merit")
    s.add_argument("--m", type=int, help="phase levels for the oracle")
    s.add_argument("--eps", type=float, default=1e-9)
    s.add_argument("--delta", type=float)
    s.add_argument("--delta0", type=float)
    s.add_argument("--restarts", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--reference", help="JSON with externally obtained s_phases to evaluate")
    s.add_argument("--no-timing", action="store_true")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="MERIT benchmark table")
    b.add_argument("--scenario", choices=SCENARIOS[:-1], required=True)
    b.add_argument("--n-list", required=True)
    b.add_argument("--rank", type=int)
    b.add_argument("--trials", type=int, default=20)
    b.add_argument("--eps", type=float, default=1e-9)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--no-timing", action="store_true")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("caf", help="thumbtack CAF synthesis from a Bjorck code")
    c.add_argument("--n", type=int, default=53)
    c.add_argument("--tau-grid", type=int, default=41)
    c.add_argument("--f-grid", type=int, default=41)
    c.add_argument("--iters", type=int, default=50)
    c.add_argument("--solver", choices=("local", "merit"), default="local")
    c.add_argument("--out", required=True, help="output prefix for .csv and .json")
    c.set_defaults(func=cmd_caf)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"uqp: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, ArithmeticError, KeyError, json.JSONDecodeError) as exc:
        print(f"uqp: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
