"""Command-line entry point: ``packtravel <subcommand> ...``.

Exit codes: 0 success, 1 the instance cannot be handled (zero velocity,
too many items for the oracle), 2 unreadable input, 3 a solve stopped by
its limits before proving optimality.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .ankp import approximation_error_bound, build_ankp, segment_set
from .ankp import sidecar as ankp_sidecar
from .bnb import Limits, TooLarge, solve_bb, solve_oracle
from .enkp import EnkpOptions, build_enkp
from .enkp import sidecar as enkp_sidecar
from .io import (INSTANCE_SCHEMA, InvalidPermutation, ParseError, dump_instance, load_instance,
                 read_plan, write_results)
from .mip import write_lp
from .model import DegenerateVelocity, InvalidInstance, evaluate
from .preprocess import no_reduction, preprocess
from .reduction import SspInstance, ssp_to_nkpu

EXIT_OK, EXIT_PARSE, EXIT_LIMIT = 0, 2, 3


def _emit(doc: dict, out=None):
    text = json.dumps(doc, indent=2) + "\n"
    (out or sys.stdout).write(text)


def _load(args):
    return load_instance(args.instance, getattr(args, "tour", None), getattr(args, "metric", None))


def cmd_evaluate(args) -> int:
    instance, _ = _load(args)
    plan = read_plan(args.plan, instance)
    res = evaluate(instance, plan)
    _emit({"schema": "packtravel.evaluate/1", "instance": instance.name, "plan": plan.bits,
           **res.as_dict()})
    return EXIT_OK


def cmd_preprocess(args) -> int:
    instance, _ = _load(args)
    report = preprocess(instance)
    _emit({"schema": "packtravel.preprocess/1", "instance": instance.name, "m": instance.m,
           **report.as_dict()})
    return EXIT_OK


def _solve_doc(instance, result, report=None) -> dict:
    doc = {"schema": "packtravel.solve/1", "instance": instance.name, "m": instance.m,
           **result.as_dict()}
    if report is not None:
        doc["alpha"] = report.alpha
        doc["ver"] = report.ver
    return doc


def cmd_solve(args) -> int:
    instance, _ = _load(args)
    report = no_reduction(instance) if args.no_preprocess else preprocess(instance)
    result = solve_bb(instance, report, Limits(args.time_limit, args.node_limit),
                      fractional_bound=args.fractional_bound)
    doc = _solve_doc(instance, result, report)
    doc["timings"] = {"wall_time": result.wall_time}
    _emit(doc)
    return EXIT_OK if result.proven_optimal else EXIT_LIMIT


def cmd_oracle(args) -> int:
    instance, meta = _load(args)
    result = solve_oracle(instance)
    doc = _solve_doc(instance, result)
    if "threshold" in meta:
        B = float(meta["threshold"])
        doc["threshold"] = B
        doc["decision"] = "YES" if result.objective >= B - 1e-9 else "NO"
        if "target" in meta:
            weight = sum(instance.items[k].weight for k in result.plan.indices)
            doc["weight_hits_target"] = weight == meta["target"]
    doc["timings"] = {"wall_time": result.wall_time}
    _emit(doc)
    return EXIT_OK


def _sidecar_path(out: Path) -> Path:
    return out.with_suffix(".json")


def cmd_emit_enkp(args) -> int:
    instance, _ = _load(args)
    report = no_reduction(instance) if args.no_preprocess else preprocess(instance)
    options = EnkpOptions(rlt=args.rlt, dominance=args.dominance)
    model = build_enkp(instance, report, options)
    out = Path(args.out)
    write_lp(model, out)
    meta = enkp_sidecar(instance, report, model, options)
    _sidecar_path(out).write_text(json.dumps(meta, indent=1) + "\n")
    _emit({"schema": "packtravel.emit/1", "kind": "enkp", "out": str(out),
           "objective_constant": model.objective_constant, "alpha": report.alpha, "ver": report.ver,
           **model.stats()})
    return EXIT_OK


def cmd_emit_ankp(args) -> int:
    instance, _ = _load(args)
    report = no_reduction(instance) if args.no_preprocess else preprocess(instance)
    model = build_ankp(instance, report, args.tau)
    seg = segment_set(instance, report, args.tau)
    out = Path(args.out)
    write_lp(model, out)
    meta = ankp_sidecar(instance, report, model, args.tau)
    _sidecar_path(out).write_text(json.dumps(meta, indent=1) + "\n")
    _emit({"schema": "packtravel.emit/1", "kind": "ankp", "out": str(out), "tau": args.tau,
           "beta": seg.beta, "error_bound": approximation_error_bound(seg.breakpoints),
           "objective_constant": model.objective_constant, "alpha": report.alpha, "ver": report.ver,
           **model.stats()})
    return EXIT_OK


def cmd_gen_ssp(args) -> int:
    values = [int(v) for v in args.values.split(",") if v.strip()]
    ssp = SspInstance(tuple(values), args.target)
    instance, B = ssp_to_nkpu(ssp)
    meta = {"source": "ssp", "values": values, "target": args.target, "threshold": B}
    text = dump_instance(instance, meta)
    if args.out:
        Path(args.out).write_text(text)
        _emit({"schema": "packtravel.gen-ssp/1", "out": args.out, "threshold": B})
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _is_instance_json(path: Path) -> bool:
    # sidecars and other JSON files may share the directory
    try:
        return json.loads(path.read_text()).get("schema") == INSTANCE_SCHEMA
    except (json.JSONDecodeError, AttributeError):
        return False


def _bench_inputs(directory: Path) -> list[tuple[Path, Path | None]]:
    found = []
    for path in sorted(directory.iterdir()):
        if path.suffix == ".ttp" or (path.suffix == ".json" and _is_instance_json(path)):
            tour = path.with_suffix(".tour")
            found.append((path, tour if tour.exists() else None))
    return found


def bench_one(path: Path, tour: Path | None, limits: Limits, tau: int, metric: str | None) -> dict:
    instance, _ = load_instance(path, tour, metric)
    start = time.perf_counter()
    report = preprocess(instance)
    result = solve_bb(instance, report, limits)
    elapsed = time.perf_counter() - start
    return {
        "instance": path.name,
        "method": "bb",
        "m": instance.m,
        "alpha": f"{report.alpha:.1f}",
        "ver": report.ver,
        "t": f"{elapsed:.3f}",
        "gap": f"{result.gap:.2f}",
        "beta": f"{segment_set(instance, report, tau).beta:.1f}",
        "objective": repr(result.objective),
        "proven_optimal": int(result.proven_optimal),
        "nodes": result.nodes,
        "plan": result.plan.bits,
        "version": __version__,
    }


def cmd_bench(args) -> int:
    inputs = _bench_inputs(Path(args.dir))
    limits = Limits(args.time_limit, args.node_limit)
    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        rows = list(pool.map(lambda pt: bench_one(pt[0], pt[1], limits, args.tau, args.metric), inputs))
    write_results(rows, args.out)
    _emit({"schema": "packtravel.bench/1", "out": args.out, "instances": len(rows),
           "proven_optimal": sum(r["proven_optimal"] for r in rows)})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="packtravel",
                                     description="Packing items along a fixed route.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def with_instance(p):
        p.add_argument("--instance", required=True, help="native JSON or TTP instance file")
        p.add_argument("--tour", help="tour file for TTP instances (default: identity)")
        p.add_argument("--metric", choices=["ceil2d", "euclid", "euc2d"],
                       help="distance rounding for TTP coordinates (default: from file, else CEIL_2D)")
        return p

    p = with_instance(sub.add_parser("evaluate", help="evaluate a packing plan"))
    p.add_argument("--plan", required=True, help="0/1 bits, or a file holding them")
    p.set_defaults(func=cmd_evaluate)

    p = with_instance(sub.add_parser("preprocess", help="find compulsory and unprofitable items"))
    p.set_defaults(func=cmd_preprocess)

    p = with_instance(sub.add_parser("solve", help="branch-and-bound"))
    p.add_argument("--time-limit", type=float)
    p.add_argument("--node-limit", type=int)
    p.add_argument("--fractional-bound", action="store_true")
    p.add_argument("--no-preprocess", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = with_instance(sub.add_parser("oracle", help="exhaustive enumeration (small instances)"))
    p.set_defaults(func=cmd_oracle)

    p = with_instance(sub.add_parser("emit-enkp", help="write the exact MIP as an LP file"))
    p.add_argument("--rlt", action="store_true")
    p.add_argument("--dominance", action="store_true")
    p.add_argument("--no-preprocess", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_emit_enkp)

    p = with_instance(sub.add_parser("emit-ankp", help="write the piecewise-linear MIP as an LP file"))
    p.add_argument("--tau", type=int, default=100)
    p.add_argument("--no-preprocess", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_emit_ankp)

    p = sub.add_parser("gen-ssp", help="instance from a subset-sum problem")
    p.add_argument("--values", required=True, help="comma-separated positive integers")
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_ssp)

    p = sub.add_parser("bench", help="preprocess and solve every instance in a directory")
    p.add_argument("--dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--time-limit", type=float)
    p.add_argument("--node-limit", type=int)
    p.add_argument("--tau", type=int, default=100)
    p.add_argument("--metric", choices=["ceil2d", "euclid", "euc2d"])
    p.add_argument("--workers", type=int, default=4)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DegenerateVelocity as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ParseError, InvalidPermutation, InvalidInstance, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
