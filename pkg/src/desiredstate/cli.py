"""Command-line front end.

Exit codes: 0 success, 1 diagnostics or non-compliance, 2 infeasible (no
configuration exists), 3 a limit was hit before any solution was found.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from importlib import resources
from pathlib import Path

from . import __version__

EXIT_OK, EXIT_DIAGNOSTICS, EXIT_INFEASIBLE, EXIT_LIMIT = 0, 1, 2, 3

# Published reference values: (variables, solutions); None where the table has none.
PUBLISHED_ROWS = {
    "exp1": (1, 2),
    "exp2": (2, 4),
    "exp3": (4, 16),
    "exp4": (8, 256),
    "exp5": (16, 65_536),
    "exp6": (80, 123_763_041),
    "exp7": (80, 104),
    "exp8": (288, ">180000000"),
    "exp9": (16_650, None),
    "exp10": (263_168, None),
    "exp11": (230, 5_634_300),
}


def experiments_dir() -> Path:
    return Path(str(resources.files("desiredstate") / "experiments"))


def _err(msg: str):
    print(msg, file=sys.stderr)


def _load(path, max_count=None):
    from .lang import DsdError, load_dsd

    try:
        return load_dsd(path, max_instances=max_count)
    except DsdError as exc:
        for d in exc.diagnostics:
            _err(f"{path}:{d.position}: {d.severity}: {d.message}")
        raise SystemExit(EXIT_DIAGNOSTICS)
    except OSError as exc:
        _err(f"{path}: {exc.strerror or exc}")
        raise SystemExit(EXIT_DIAGNOSTICS)


def _compile(dsd):
    from .compiler import CompileError, compile_dsd

    try:
        return compile_dsd(dsd)
    except CompileError as exc:
        _err(f"compile error: {exc}")
        raise SystemExit(EXIT_DIAGNOSTICS)


def _limits(args, default_limit=None, capture_k=0):
    from .csp import Capture, SolveLimits

    limit = args.limit if args.limit is not None else default_limit
    return SolveLimits(
        max_solutions=limit,
        time_budget=args.time_budget,
        capture=Capture.FIRST_K if capture_k else Capture.NONE,
        capture_k=capture_k,
    )


def _no_solution_code(exhausted: bool) -> int:
    return EXIT_INFEASIBLE if exhausted else EXIT_LIMIT


def _read_cdd(path):
    from .configuration import CddFormatError, parse_cdd

    try:
        return parse_cdd(Path(path).read_text(encoding="utf-8"))
    except CddFormatError as exc:
        _err(f"{path}: {exc}")
        raise SystemExit(EXIT_DIAGNOSTICS)
    except OSError as exc:
        _err(f"{path}: {exc.strerror or exc}")
        raise SystemExit(EXIT_DIAGNOSTICS)


# -- subcommands ---------------------------------------------------------------------


def cmd_check(args) -> int:
    from .lang import check_source, parse_source, pretty_print

    status = EXIT_OK
    for path in args.files:
        try:
            source = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            _err(f"{path}: {exc.strerror or exc}")
            status = EXIT_DIAGNOSTICS
            continue
        diags = check_source(source)
        if args.json:
            print(json.dumps({"file": str(path), "diagnostics": [d.as_dict() for d in diags]}))
        else:
            for d in diags:
                print(f"{path}:{d.position}: {d.severity}: {d.message}")
        if diags:
            status = EXIT_DIAGNOSTICS
        elif args.print:
            sys.stdout.write(pretty_print(parse_source(source, Path(path).stem)))
        elif not args.json:
            print(f"{path}: ok")
    return status


def cmd_count(args) -> int:
    from .csp import warm_up

    dsd = _load(args.file, args.max_count)
    warm_up()
    t0 = time.perf_counter()
    csp = _compile(dsd)
    compile_s = time.perf_counter() - t0
    if args.explain:
        from .compiler import explain

        sys.stdout.write(explain(csp))
    if args.dump:
        Path(args.dump).write_text(csp.model.dump(), encoding="utf-8")
    res = csp.model.enumerate(_limits(args))
    print(f"variables={csp.num_variables} solutions={res.solution_count} exhausted={str(res.exhausted).lower()}")
    latency = "none" if res.first_solution_latency is None else f"{res.first_solution_latency:.6f}"
    print(f"first_solution_s={latency} elapsed_s={res.elapsed:.3f} compile_s={compile_s:.3f} "
          f"constraints={csp.model.num_constraints} nodes={res.nodes}")
    if res.solution_count == 0:
        return _no_solution_code(res.exhausted)
    return EXIT_OK


def cmd_solve(args) -> int:
    from .compiler import decode
    from .configuration import serialize_cdd

    dsd = _load(args.file, args.max_count)
    csp = _compile(dsd)
    limits = _limits(args, default_limit=1)
    search = csp.model.search(limits)
    written = 0
    out_dir = Path(args.output) if args.output else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    for row in search:
        cdd = decode(csp, row)
        text = serialize_cdd(cdd)
        written += 1
        if out_dir:
            (out_dir / f"{dsd.name}-{written:04d}.cdd").write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    _err(f"solutions={written} exhausted={str(search.exhausted).lower()}")
    if written == 0:
        return _no_solution_code(search.exhausted)
    return EXIT_OK


def cmd_pick(args) -> int:
    from .compiler import decode
    from .configuration import NoConfiguration, PickerPolicy, Weights, pick, serialize_cdd

    dsd = _load(args.file, args.max_count)
    csp = _compile(dsd)
    current = _read_cdd(args.current) if args.current else None
    if current is not None and current.dsd_ref != dsd.name:
        current = replace(current, dsd_ref=dsd.name)
    policy = PickerPolicy(args.policy, Weights.parse(args.weights), args.limit, args.time_budget)
    limits = _limits(args)
    search = csp.model.search(limits)
    stream = (decode(csp, row) for row in search)
    try:
        res = pick(stream, current, policy, dsd)
    except NoConfiguration:
        _err("no candidate configuration")
        return _no_solution_code(search.exhausted)
    text = serialize_cdd(res.chosen)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    _err(f"policy={policy.kind} seen={res.seen} index={res.index} {res.delta.summary()}")
    return EXIT_OK


def cmd_validate(args) -> int:
    from .configuration import UnknownReference, validate

    dsd = _load(args.dsd, args.max_count)
    cdd = _read_cdd(args.cdd)
    try:
        report = validate(cdd, dsd)
    except UnknownReference as exc:
        _err(f"{args.cdd}: {exc}")
        return EXIT_DIAGNOSTICS
    sys.stdout.write(report.to_json() + "\n" if args.json else report.to_text())
    if not report.compliant:
        for r in report.failures:
            _err(f"violated: {r.name} {r.detail}")
        return EXIT_DIAGNOSTICS
    return EXIT_OK


def cmd_simulate(args) -> int:
    from .configuration import PickerPolicy, Weights
    from .runtime import FaultScriptError, UnknownTarget, parse_fault_script, simulate

    dsd = _load(args.file, args.max_count)
    faults = []
    if args.faults:
        try:
            faults = parse_fault_script(Path(args.faults).read_text(encoding="utf-8"))
        except (OSError, FaultScriptError) as exc:
            _err(f"{args.faults}: {exc}")
            return EXIT_DIAGNOSTICS
    policy = PickerPolicy(args.policy, Weights.parse(args.weights), args.cap)
    try:
        realm = simulate(dsd, faults, seed=args.seed, ticks=args.ticks, policy=policy,
                         tick_period=args.tick_period)
    except UnknownTarget as exc:
        _err(f"fault script: {exc}")
        return EXIT_DIAGNOSTICS
    text = realm.log.text()
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_INFEASIBLE if realm.degraded else EXIT_OK


def _bench_row(path: Path, budget, full: bool):
    """Compile, time the first 1000 solutions, then count under the budget."""
    from .csp import SolveLimits

    dsd = _load(path)
    t0 = time.perf_counter()
    csp = _compile(dsd)
    compile_s = time.perf_counter() - t0
    head = csp.model.enumerate(SolveLimits(max_solutions=1000, time_budget=None if full else budget))
    k1000 = head.elapsed if head.solution_count == 1000 else None
    if head.exhausted:
        res = head
    else:
        res = csp.model.enumerate(SolveLimits(time_budget=None if full else budget))
    return csp, compile_s, res, k1000


def cmd_bench(args) -> int:
    from .csp import warm_up

    warm_up()
    root = Path(args.dir) if args.dir else experiments_dir()
    names = args.only.split(",") if args.only else list(PUBLISHED_ROWS)
    cols = ["name", "variables", "solutions", "exhausted", "first_solution_s", "k1000_s", "all_s",
            "compile_s", "published_variables", "published_solutions"]
    print("\t".join(cols))
    for name in names:
        path = root / f"{name}.deladas"
        csp, compile_s, res, k1000 = _bench_row(path, args.time_budget, args.full)
        first = res.first_solution_latency
        solutions = str(res.solution_count) if res.exhausted else f">={res.solution_count}"
        pv, ps = PUBLISHED_ROWS.get(name, (None, None))
        row = [
            name,
            str(csp.num_variables),
            solutions,
            str(res.exhausted).lower(),
            "-" if first is None else f"{first:.4f}",
            "-" if k1000 is None else f"{k1000:.4f}",
            f"{res.elapsed:.3f}" if res.exhausted else "-",
            f"{compile_s:.3f}",
            "-" if pv is None else str(pv),
            "-" if ps is None else str(ps),
        ]
        print("\t".join(row), flush=True)
    return EXIT_OK


# -- parser ------------------------------------------------------------------------------


def _non_negative_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _non_negative_float(text):
    v = float(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="desiredstate", description="Desired-state compilation, solving and simulation.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def limits(sp, limit_help="stop after N solutions"):
        sp.add_argument("--limit", type=_non_negative_int, help=limit_help)
        sp.add_argument("--time-budget", type=_non_negative_float, metavar="SECONDS")
        sp.add_argument("--max-count", type=_positive_int, metavar="K", help="override maxInstancesPerHost")

    sp = sub.add_parser("check", help="parse and resolve descriptions, print diagnostics")
    sp.add_argument("files", nargs="+")
    sp.add_argument("--json", action="store_true", help="one JSON diagnostic list per file")
    sp.add_argument("--print", action="store_true", help="print the canonical form of clean files")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("count", help="count compliant configurations")
    sp.add_argument("file")
    limits(sp)
    sp.add_argument("--explain", action="store_true", help="map each conjunct to its constraint families")
    sp.add_argument("--dump", metavar="PATH", help="write the model dump")
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("solve", help="write candidate configurations as CDD XML")
    sp.add_argument("file")
    limits(sp, "number of configurations to emit (default 1)")
    sp.add_argument("-o", "--output", metavar="DIR")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("pick", help="choose a configuration relative to a current one")
    sp.add_argument("file")
    sp.add_argument("--current", metavar="CDD")
    limits(sp, "candidate cap")
    sp.add_argument("--policy", choices=("first", "min-delta"), default="min-delta")
    sp.add_argument("--weights", default="1,1,1", metavar="DEPLOY,UNDEPLOY,REBIND")
    sp.add_argument("-o", "--output", metavar="PATH")
    sp.set_defaults(func=cmd_pick)

    sp = sub.add_parser("validate", help="check a CDD against a description")
    sp.add_argument("cdd")
    sp.add_argument("--dsd", required=True)
    sp.add_argument("--max-count", type=_positive_int, metavar="K")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("simulate", help="enact and maintain a deployment under a fault script")
    sp.add_argument("file")
    sp.add_argument("--faults", metavar="SCRIPT")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--ticks", type=_positive_int)
    sp.add_argument("--tick-period", type=_positive_int, default=10)
    sp.add_argument("--cap", type=_positive_int, default=10_000, help="candidate cap for re-solving")
    sp.add_argument("--policy", choices=("first", "min-delta"), default="min-delta")
    sp.add_argument("--weights", default="1,1,1", metavar="DEPLOY,UNDEPLOY,REBIND")
    sp.add_argument("--max-count", type=_positive_int, metavar="K")
    sp.add_argument("-o", "--output", metavar="PATH")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("bench", help="reproduce the solver performance table")
    sp.add_argument("--dir", help="directory of expN.deladas files (default: bundled)")
    sp.add_argument("--only", help="comma-separated experiment names")
    sp.add_argument("--time-budget", type=_non_negative_float, default=30.0, metavar="SECONDS",
                    help="per-experiment enumeration budget")
    sp.add_argument("--full", action="store_true", help="no budget: enumerate every row to exhaustion")
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except ValueError as exc:
        _err(f"error: {exc}")
        return EXIT_DIAGNOSTICS


if __name__ == "__main__":
    sys.exit(main())
