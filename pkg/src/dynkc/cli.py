"""Command-line front end: ``generate``, ``run`` and ``validate``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from .engine import MAX_NETS, Engine, InfeasibleParameters
from .metric import RejectedInput
from .navnet import Mode
from .workload import (
    QUERY_PROB, TraceError, aggregate, gen_random, geometric_mean, load_points_csv, random_mix_trace,
    read_trace, replay, sliding_window_trace, write_points_csv, write_trace,
)

log = logging.getLogger("dynkc")

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_IO = 0, 1, 2, 3
SEED_ENV = "DYNKC_SEED"
EPSILONS = (0.1, 0.5, 1.0, 4.0)
KS = (20, 50, 100, 200)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dynkc", description="Fully dynamic k-center clustering with offset navigating nets.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    gen = sub.add_parser("generate", help="write a point CSV and/or an update trace")
    gen.add_argument("--random", action="store_true", help="generate Gaussian blobs")
    gen.add_argument("--seeds", type=_positive_int, default=100, help="number of blob centers")
    gen.add_argument("--per", type=_positive_int, default=200, help="points per blob")
    gen.add_argument("--variance", type=_positive_float, default=0.001)
    gen.add_argument("--points", type=Path, help="existing point CSV to build the trace from")
    gen.add_argument("--trace", choices=("sliding", "mix"))
    gen.add_argument("--window", type=_positive_int, default=6000)
    gen.add_argument("--query-every", type=_positive_int, default=200)
    gen.add_argument("--delete-frac", type=float, default=0.3)
    gen.add_argument("--query-prob", type=float, default=QUERY_PROB)
    gen.add_argument("--max-events", type=_positive_int)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=Path, default=Path("."), help="output directory")

    run = sub.add_parser("run", help="replay traces over an epsilon/k grid and write metrics")
    run.add_argument("--trace", type=Path, nargs="+", required=True)
    run.add_argument("--epsilon", type=_positive_float, nargs="+", default=list(EPSILONS))
    run.add_argument("--k", type=_positive_int, nargs="+", default=list(KS))
    run.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.TREE.value)
    run.add_argument("--psi", type=float, default=4.0)
    run.add_argument("--repeats", type=_positive_int, default=10)
    run.add_argument("--jobs", type=_positive_int, default=1)
    run.add_argument("--max-nets", type=_positive_int, default=MAX_NETS)
    run.add_argument("--compare-gonzalez", action="store_true")
    run.add_argument("--seed", type=int, default=0, help="recorded in the metrics; traces carry their own seed")
    run.add_argument("--out", type=Path, default=Path("results"))

    val = sub.add_parser("validate", help="replay a trace, checking every invariant after each event")
    val.add_argument("--trace", type=Path, required=True)
    val.add_argument("--epsilon", type=_positive_float, nargs="+", default=[4.0])
    val.add_argument("--mode", choices=[m.value for m in Mode], nargs="+", default=[m.value for m in Mode])
    val.add_argument("--psi", type=float, default=4.0)
    val.add_argument("--max-nets", type=_positive_int, default=MAX_NETS)
    val.add_argument("--inject-fault", action="store_true",
                     help="corrupt one net mid-replay; the run must then report violations")
    val.add_argument("--seed", type=int, default=0)
    return parser


def effective_seed(cli_seed: int) -> int:
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return cli_seed
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


# -- generate ------------------------------------------------------------

def cmd_generate(args) -> int:
    seed = effective_seed(args.seed)
    if not args.random and args.trace is None:
        raise UsageError("generate needs --random and/or --trace")
    if args.random and args.points is not None:
        raise UsageError("--random and --points are exclusive")
    args.out.mkdir(parents=True, exist_ok=True)
    points = None
    if args.random:
        points = gen_random(args.seeds, args.per, args.variance, seed)
        path = args.out / "points.csv"
        write_points_csv(points, path)
        print(f"points: {path} ({len(points)} points, seed {seed})")
    if args.trace is not None:
        if points is None:
            if args.points is None:
                raise UsageError("--trace needs --random or --points")
            points = load_points_csv(args.points)
        if args.trace == "sliding":
            trace = sliding_window_trace(points, args.window, args.query_every, seed)
        else:
            if args.delete_frac < 0 or args.query_prob < 0 or args.delete_frac + args.query_prob > 1:
                raise UsageError("--delete-frac and --query-prob must be probabilities summing to at most 1")
            trace = random_mix_trace(points, args.delete_frac, seed, args.query_prob, args.max_events)
        path = args.out / f"trace-{args.trace}.txt"
        write_trace(trace, path)
        counts = trace.counts()
        print(f"trace: {path} ({counts['+']} inserts, {counts['-']} deletes, "
              f"{counts['?']} queries, seed {seed})")
    return EXIT_OK


# -- run -----------------------------------------------------------------

def _cell_dir(out: Path, trace_name: str, eps: float, k: int) -> Path:
    return out / trace_name / f"eps{eps:g}_k{k}"


def _run_cell(trace_path: Path, eps: float, k: int, mode: str, psi: float, repeats: int, max_nets: int,
              compare: bool, out: Path, seed: int) -> dict:
    """One (trace, epsilon, k) cell: ``repeats`` timed replays, each on a fresh engine."""
    trace = read_trace(trace_path)
    cell = _cell_dir(out, trace_path.stem, eps, k)
    cell.mkdir(parents=True, exist_ok=True)
    try:
        Engine(eps, k_hint=k, mode=mode, psi=psi, max_nets=max_nets)
    except InfeasibleParameters as exc:
        return {"trace": trace_path.stem, "epsilon": eps, "k": k, "error": str(exc)}
    files = []
    for r in range(repeats):
        engine = Engine(eps, k_hint=k, mode=mode, psi=psi, max_nets=max_nets)
        metrics = replay(trace, engine, k, compare_gonzalez=compare)
        metrics.config["repeat"] = r
        metrics.config["cli_seed"] = seed
        path = cell / f"run{r}.json"
        metrics.dump(path)
        files.append(str(path))
    return {"trace": trace_path.stem, "epsilon": eps, "k": k, "runs": files}


def load_aggregate(run_files: Sequence) -> dict:
    runs = [json.loads(Path(f).read_text(encoding="utf-8")) for f in run_files]
    return aggregate(runs)


def build_table(aggregates: Sequence[dict]) -> dict:
    """Rows k, columns epsilon; each cell is a geometric mean over traces.

    A pure function of the aggregate documents, so tables can be rebuilt from
    the stored JSON alone.
    """
    cells: dict[tuple[int, float], list[dict]] = {}
    for agg in aggregates:
        cfg = agg["config"]
        cells.setdefault((cfg["k"], cfg["epsilon"]), []).append(agg)
    ks = sorted({k for k, _ in cells})
    epss = sorted({e for _, e in cells})
    table = {"k": ks, "epsilon": epss, "mean_update_ns": [], "mean_query_ns": [], "geomean_quality_ratio": []}
    for k in ks:
        upd, qry, qual = [], [], []
        for e in epss:
            group = cells.get((k, e))
            if not group:
                upd.append(None), qry.append(None), qual.append(None)
                continue
            upd.append(geometric_mean(max(_update_mean(a), 1e-9) for a in group))
            qry.append(geometric_mean(max(a["mean_query_ns"], 1e-9) for a in group))
            ratios = [a["geomean_quality_ratio"] for a in group if "geomean_quality_ratio" in a]
            qual.append(geometric_mean(ratios) if ratios else None)
        table["mean_update_ns"].append(upd)
        table["mean_query_ns"].append(qry)
        table["geomean_quality_ratio"].append(qual)
    return table


def _update_mean(agg: dict) -> float:
    return (agg["mean_insert_ns"] + agg["mean_delete_ns"]) / 2


def format_table(table: dict, key: str, scale: float = 1.0, fmt: str = "{:.3f}") -> str:
    head = "k \\ eps".ljust(9) + "".join(f"{e:>12g}" for e in table["epsilon"])
    lines = [head]
    for k, row in zip(table["k"], table[key]):
        lines.append(f"{k:<9d}" + "".join(f"{'-':>12}" if v is None else f"{fmt.format(v / scale):>12}"
                                          for v in row))
    return "\n".join(lines)


def cmd_run(args) -> int:
    seed = effective_seed(args.seed)
    for path in args.trace:
        if not path.is_file():
            raise FileNotFoundError(f"trace not found: {path}")
    args.out.mkdir(parents=True, exist_ok=True)
    jobs = [(t, e, k) for t in args.trace for e in args.epsilon for k in args.k]
    common = (args.mode, args.psi, args.repeats, args.max_nets, args.compare_gonzalez, args.out, seed)
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(_run_cell, t, e, k, *common) for t, e, k in jobs]
            results = [f.result() for f in futures]
    else:
        results = [_run_cell(t, e, k, *common) for t, e, k in jobs]

    aggregates = []
    for res in results:
        if "error" in res:
            print(f"eps={res['epsilon']:g} k={res['k']}: skipped ({res['error']})", file=sys.stderr)
            continue
        agg = load_aggregate(res["runs"])
        agg["trace"] = res["trace"]
        cell = _cell_dir(args.out, res["trace"], res["epsilon"], res["k"])
        (cell / "aggregate.json").write_text(json.dumps(agg, indent=1) + "\n", encoding="utf-8")
        aggregates.append(agg)
    if not aggregates:
        print("no cell could be run", file=sys.stderr)
        return EXIT_USAGE
    table = build_table(aggregates)
    (args.out / "table.json").write_text(json.dumps(table, indent=1) + "\n", encoding="utf-8")
    text = "mean update time (us)\n" + format_table(table, "mean_update_ns", 1e3)
    text += "\n\nmean query time (us)\n" + format_table(table, "mean_query_ns", 1e3)
    if args.compare_gonzalez:
        text += "\n\ngeometric-mean phi ratio vs. Gonzalez recompute\n" + format_table(table, "geomean_quality_ratio")
    (args.out / "table.txt").write_text(text + "\n", encoding="utf-8")
    print(text)
    return EXIT_OK


# -- validate ------------------------------------------------------------

def _corrupt(engine: Engine) -> bool:
    """Lower the top level of one non-root point in the first net."""
    net = engine.nets[0]
    victims = [x for x in sorted(engine.points) if x != net.root]
    if not victims:
        return False
    x = victims[-1]
    net._set_top(x, net.top(x) - 1)
    return True


def cmd_validate(args) -> int:
    effective_seed(args.seed)
    trace = read_trace(args.trace)
    trace.check()
    failed = False
    for mode in args.mode:
        for eps in args.epsilon:
            engine = Engine(eps, mode=mode, psi=args.psi, max_nets=args.max_nets)
            injected = not args.inject_fault
            bad = None
            for n, e in enumerate(trace.events):
                if e.kind == "+":
                    engine.insert(e.point)
                elif e.kind == "-":
                    engine.delete(e.id)
                else:
                    continue
                if not injected:
                    injected = _corrupt(engine)
                report = engine.validate()
                if not report.ok:
                    bad = (n, report)
                    break
            label = f"mode={mode} eps={eps:g} (m={engine.m})"
            if bad is None:
                print(f"{label}: {len(trace.events)} events, no violations")
            else:
                failed = True
                n, report = bad
                print(f"{label}: violations after event {n}:\n{report}")
    return EXIT_INVALID if failed else EXIT_OK


COMMANDS = {"generate": cmd_generate, "run": cmd_run, "validate": cmd_validate}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"dynkc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleParameters as exc:
        print(f"dynkc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, TraceError, RejectedInput) as exc:
        print(f"dynkc: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"dynkc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
