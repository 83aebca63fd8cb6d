"""Command-line surface: instance generation, solving, oracles, benchmark
sweeps, and the property verification suites.

Exit codes: 0 success, 2 infeasible solution detected or a criterion failed,
3 invalid input. SOLVER_WORKERS caps benchmark concurrency.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import io
import json
import os
import sys
import time
from pathlib import Path

from .dp import SolverParams
from .generators import KINDS, GeneratorSpec, generate_instance
from .graphs import certify_2ecss, minimum_spanning_tree
from .hierarchy import PartitionParams, assign_portals, build_cluster_tree
from .metric import MetricError, MetricInstance, estimate_doubling_dimension
from .oracles import OracleRangeError, brute_force_2ecss, double_mst_baseline, held_karp_tsp
from .properties import ALL_CRITERIA, LEMMA_CRITERIA, run_all
from .solver import solve_2ecss

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_INVALID = 3


def _solver_params(args: argparse.Namespace) -> SolverParams:
    kw: dict = {}
    if args.eps is not None:
        kw["epsilon"] = args.eps
    if args.k is not None:
        kw["k"] = args.k
    if args.q is not None:
        kw["q"] = args.q
    if args.r_cap is not None:
        kw["r_cap"] = args.r_cap
    if args.portal_cap is not None:
        kw["portal_cap"] = args.portal_cap
    if args.best_of is not None:
        kw["best_of"] = args.best_of
    if args.no_fallback:
        kw["fallback_baseline"] = False
    return SolverParams(**kw)


def _load_instance(path: str) -> MetricInstance:
    try:
        return MetricInstance.load(path)
    except (OSError, MetricError, ValueError, KeyError) as exc:
        print(f"error: cannot load instance {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID) from exc


def cmd_gen(args: argparse.Namespace) -> int:
    spec = GeneratorSpec(kind=args.kind, n=args.n, dim=args.dim,
                         clusters=args.clusters, spread=args.spread,
                         seed=args.seed, path=args.matrix)
    inst = generate_instance(spec)
    if args.out:
        inst.save(args.out)
        print(f"wrote {args.out} (n={inst.n})")
    else:
        json.dump(inst.to_json(), sys.stdout, indent=1)
        print()
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    inst = _load_instance(args.instance)
    params = _solver_params(args)
    sol, report = solve_2ecss(inst, params, seed=args.seed)
    if args.dump_tree:
        pp = PartitionParams.for_instance(inst, epsilon=params.epsilon,
                                          k=params.k, s=params.s, seed=args.seed)
        tree = build_cluster_tree(inst, pp)
        assign_portals(tree)
        tree.dump(args.dump_tree)
    payload = {"solution": sol.to_json(), "report": report.to_json()}
    out = json.dumps(payload, indent=1)
    if args.out:
        Path(args.out).write_text(out + "\n")
    else:
        print(out)
    return EXIT_OK if sol.feasible else EXIT_INFEASIBLE


def cmd_oracle(args: argparse.Namespace) -> int:
    inst = _load_instance(args.instance)
    methods = {"brute-2ecss": brute_force_2ecss, "held-karp-tsp": held_karp_tsp,
               "double-mst": double_mst_baseline}
    try:
        res = methods[args.method](inst)
    except OracleRangeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(json.dumps({"method": res.method, "weight": res.weight,
                      "edges": sorted(list(e) for e in res.edges)}, indent=1))
    return EXIT_OK


def _bench_row(task: tuple) -> dict:
    idx, spec_json, seed, params_json = task
    spec = GeneratorSpec(**spec_json)
    params = SolverParams(**params_json)
    inst = generate_instance(spec)
    t0 = time.perf_counter()
    sol, report = solve_2ecss(inst, params, seed=seed)
    wall_ms = (time.perf_counter() - t0) * 1e3
    mst = minimum_spanning_tree(inst)[1] if inst.n >= 2 else 0.0
    row = {
        "instance": idx, "n": inst.n,
        "k_estimate": estimate_doubling_dimension(inst),
        "mst": round(mst, 9), "baseline": round(report.baseline_weight, 9),
        "dp_weight": round(sol.weight, 9), "oracle_weight": "",
        "ratio_to_oracle": "", "ratio_to_baseline": round(
            sol.weight / report.baseline_weight, 9) if report.baseline_weight else "",
        "feasible": sol.feasible, "seed": seed,
    }
    if 3 <= inst.n <= 10:
        opt = brute_force_2ecss(inst).weight
        row["oracle_weight"] = round(opt, 9)
        row["ratio_to_oracle"] = round(sol.weight / opt, 9)
    return {"row": row, "wall_ms": wall_ms, "report": report.to_json()}


def run_experiment(specs: list[GeneratorSpec], params: SolverParams, seed: int,
                   repetitions: int = 1, workers: int | None = None) -> dict:
    """Solve every (spec, repetition) pair; returns rows (order-stable),
    timings, and an aggregate summary."""
    tasks = []
    for i, spec in enumerate(specs):
        for rep in range(repetitions):
            tasks.append((i, spec.to_json(), seed + 7919 * rep + i, params.__dict__.copy()))
    if workers is None:
        workers = int(os.environ.get("SOLVER_WORKERS", "1"))
    if workers > 1 and len(tasks) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_bench_row, tasks))
    else:
        results = [_bench_row(t) for t in tasks]
    order = sorted(range(len(results)),
                   key=lambda j: (results[j]["row"]["instance"], results[j]["row"]["seed"]))
    rows = [results[j]["row"] for j in order]
    timings = [round(results[j]["wall_ms"], 3) for j in order]
    reports = [results[j]["report"] for j in order]
    ratios = [r["ratio_to_baseline"] for r in rows if r["ratio_to_baseline"] != ""]
    infeasible = sum(1 for r in rows if not r["feasible"])
    summary = {
        "instances": len(rows), "infeasible": infeasible,
        "median_ratio_to_baseline": sorted(ratios)[len(ratios) // 2] if ratios else None,
        "median_n": sorted(r["n"] for r in rows)[len(rows) // 2] if rows else None,
    }
    return {"rows": rows, "summary": summary, "timings_ms": timings, "reports": reports}


CSV_FIELDS = ["instance", "n", "k_estimate", "mst", "baseline", "dp_weight",
              "oracle_weight", "ratio_to_oracle", "ratio_to_baseline", "feasible", "seed"]


def cmd_bench(args: argparse.Namespace) -> int:
    if args.suite:
        from .generators import default_suite
        specs = default_suite(args.count, seed=args.seed)
    else:
        specs = [GeneratorSpec(kind=args.kind, n=args.n, dim=args.dim,
                               seed=args.seed + i) for i in range(args.count)]
    params = _solver_params(args)
    result = run_experiment(specs, params, seed=args.seed,
                            repetitions=args.repetitions)
    out_dir = Path(args.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    fmt = args.format or "both"
    if fmt in ("csv", "both"):
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for row in result["rows"]:
            writer.writerow(row)
        (out_dir / "bench.csv").write_text(buf.getvalue())
    if fmt in ("json", "both"):
        # Timings go to a sidecar so the report proper is reproducible
        # byte-for-byte across reruns.
        payload = {"rows": result["rows"], "summary": result["summary"],
                   "reports": [{k: v for k, v in rep.items() if k != "wall_ms"}
                               for rep in result["reports"]]}
        (out_dir / "bench.json").write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
        (out_dir / "bench_timings.json").write_text(
            json.dumps({"wall_ms": result["timings_ms"]}, indent=1) + "\n")
    print(json.dumps(result["summary"], indent=1))
    if result["summary"]["infeasible"]:
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    if args.criteria:
        try:
            numbers = tuple(int(x) for x in args.criteria.split(","))
        except ValueError:
            print("error: --criteria wants a comma-separated list of numbers",
                  file=sys.stderr)
            return EXIT_INVALID
        if any(x not in ALL_CRITERIA for x in numbers):
            print(f"error: criteria must be within {ALL_CRITERIA}", file=sys.stderr)
            return EXIT_INVALID
    elif args.all:
        numbers = ALL_CRITERIA
    else:
        numbers = LEMMA_CRITERIA
    results = run_all(numbers, seed=args.seed, quick=args.quick)
    for res in results:
        print(res.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_INFEASIBLE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--eps", type=float, default=None)
    common.add_argument("--k", type=int, default=None)
    common.add_argument("--q", type=float, default=None)
    common.add_argument("--r-cap", type=int, default=None, dest="r_cap")
    common.add_argument("--portal-cap", type=int, default=None, dest="portal_cap")
    common.add_argument("--best-of", type=int, default=None, dest="best_of")
    common.add_argument("--no-fallback", action="store_true", dest="no_fallback")
    common.add_argument("--format", choices=["json", "csv", "both"], default=None,
                        help="bench output: CSV table, JSON detail, or both (default)")
    common.add_argument("--dump-tree", default=None, dest="dump_tree",
                        metavar="PATH", help="write the cluster tree JSON here")
    parser = argparse.ArgumentParser(
        prog="doubling2ecss", parents=[common],
        description="(1+eps)-approximate minimum-weight 2-edge-connected "
                    "spanning subgraphs in doubling metrics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an instance", parents=[common])
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--dim", type=int, default=2, choices=(1, 2, 3))
    p.add_argument("--clusters", type=int, default=3)
    p.add_argument("--spread", type=float, default=0.05)
    p.add_argument("--matrix", default=None, help="matrix file for kind=matrix-file")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="solve an instance file", parents=[common])
    p.add_argument("instance")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="run an exact oracle or baseline", parents=[common])
    p.add_argument("instance")
    p.add_argument("--method", choices=["brute-2ecss", "held-karp-tsp", "double-mst"],
                   default="brute-2ecss")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="benchmark sweep over generated instances",
                       parents=[common])
    p.add_argument("--kind", choices=KINDS, default="uniform-cube")
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--dim", type=int, default=2, choices=(1, 2, 3))
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--repetitions", type=int, default=1)
    p.add_argument("--suite", action="store_true",
                   help="mixed generator suite instead of one kind")
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="run the property verification suites",
                       parents=[common])
    p.add_argument("--criteria", default=None,
                   help="comma-separated criterion numbers (default: lemma suites)")
    p.add_argument("--all", action="store_true", help="run all ten criteria")
    p.add_argument("--quick", action="store_true", help="scaled-down smoke sizes")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except MetricError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
