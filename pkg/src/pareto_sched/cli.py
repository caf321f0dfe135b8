"""Command-line entry point: gen, run, front, score, table, plot."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .benchgen import BenchmarkSpec, generate
from .harness import (
    ALGORITHM_NAMES,
    ExperimentPlan,
    load_records,
    pooled_fronts,
    render_table,
    run_algorithm,
    run_plan,
    score_and_summarize,
    summary_from_csv,
    summary_to_csv,
    cell_filename,
    default_plan_path,
)
from .metrics import ReferenceFront
from .model import ProblemInstance
from .pareto import ConstraintMode

log = logging.getLogger("pareto_sched")


class CliError(Exception):
    pass


def _cmd_gen(args) -> None:
    inst = generate(BenchmarkSpec(args.tasks, args.cpus, args.deadline, args.seed))
    if args.out:
        inst.save(args.out)
    else:
        print(inst.to_json())


def _cmd_run(args) -> None:
    if args.plan:
        plan = ExperimentPlan.load(default_plan_path() if args.plan == "desk" else args.plan)
        out = args.out or "results"
        total = sum(1 for _ in plan.cells())
        counter = {"n": 0}

        def progress(rec) -> None:
            counter["n"] += 1
            log.info("[%d/%d] %s alg=%s nsol=%d run=%d", counter["n"], total, rec.instance, rec.algorithm, rec.n_sol, rec.run_index)

        records = run_plan(plan, out, workers=args.workers, progress=progress)
        print(f"{len(records)} runs in {out}")
        return
    if args.alg is None or args.instance is None:
        raise CliError("run needs either --plan or both --alg and --instance")
    inst = ProblemInstance.load(args.instance)
    rec = run_algorithm(args.alg, inst, args.nsol, args.ngen, args.seed, args.mode)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with (out / cell_filename(rec.instance, rec.algorithm, rec.n_sol)).open("a", encoding="utf-8") as fh:
            fh.write(rec.to_json() + "\n")
    else:
        print(rec.to_json())


def _require_records(results: str):
    if not Path(results).is_dir():
        raise CliError(f"results directory not found: {results}")
    records = load_records(results)
    if not records:
        raise CliError(f"no run records in {results}")
    return records


def _front_path(base: Path, instance: str, n_instances: int) -> Path:
    if n_instances == 1:
        return base
    return base.with_name(f"{base.stem}.{instance}{base.suffix or '.csv'}")


def _cmd_front(args) -> None:
    records = _require_records(args.results)
    fronts = pooled_fronts(records)
    base = Path(args.out)
    for name, front in fronts.items():
        path = _front_path(base, name, len(fronts))
        path.write_text(front.to_csv(), encoding="utf-8")
        print(f"{name}: {len(front)} points -> {path}")


def _load_fronts(spec: str, instances: list[str]) -> dict[str, ReferenceFront]:
    base = Path(spec)
    fronts = {}
    for name in instances:
        path = _front_path(base, name, len(instances))
        if not path.exists():
            raise CliError(f"front file not found: {path}")
        fronts[name] = ReferenceFront.from_csv(path.read_text(encoding="utf-8"))
    return fronts


def _cmd_score(args) -> None:
    records = _require_records(args.results)
    instances = sorted({r.instance for r in records})
    fronts = _load_fronts(args.front, instances) if args.front else None
    rows = score_and_summarize(records, fronts, tol=args.tol)
    text = summary_to_csv(rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"{len(rows)} summary rows -> {args.out}")
    else:
        print(text, end="")


def _read_summary(path: str):
    p = Path(path)
    if not p.exists():
        raise CliError(f"summary file not found: {path}")
    return summary_from_csv(p.read_text(encoding="utf-8"))


def _cmd_table(args) -> None:
    print(render_table(_read_summary(args.summary), digits=args.digits))


def _cmd_plot(args) -> None:
    from . import plotting

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = plotting.plot_summary(_read_summary(args.summary), out)
    if args.results:
        records = _require_records(args.results)
        instances = sorted({r.instance for r in records})
        fronts = _load_fronts(args.front, instances) if args.front else pooled_fronts(records)
        written += plotting.plot_archives(records, fronts, out)
    for path in written:
        print(path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pareto-sched", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a benchmark instance")
    p.add_argument("--tasks", type=int, required=True)
    p.add_argument("--cpus", type=int, required=True)
    p.add_argument("--deadline", type=float, default=30.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("run", help="run a plan or a single algorithm")
    p.add_argument("--plan", help='plan JSON, or "desk" for the bundled desk-scale plan')
    p.add_argument("--out")
    p.add_argument("--workers", type=int)
    p.add_argument("--alg", type=int, choices=sorted(ALGORITHM_NAMES))
    p.add_argument("--instance")
    p.add_argument("--nsol", type=int, default=50)
    p.add_argument("--ngen", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=[m.value for m in ConstraintMode], default=ConstraintMode.FEASIBILITY_FIRST.value)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("front", help="pool final archives into simulated fronts")
    p.add_argument("--results", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_front)

    p = sub.add_parser("score", help="score runs and write the summary CSV")
    p.add_argument("--results", required=True)
    p.add_argument("--front", help="frozen front CSV; omit to pool from the results")
    p.add_argument("--out")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("table", help="render a summary CSV as a text table")
    p.add_argument("--summary", required=True)
    p.add_argument("--digits", type=int, default=4)
    p.set_defaults(func=_cmd_table)

    p = sub.add_parser("plot", help="SVG plots of a summary (and optionally archives vs front)")
    p.add_argument("--summary", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--results")
    p.add_argument("--front")
    p.set_defaults(func=_cmd_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except (CliError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
