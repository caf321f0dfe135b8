"""Experiment grid runner, persistence and Avg/Std summaries."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import re
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .baselines import MopsoParams, MossoParams, NsgaParams, run_mopso, run_mosso, run_nsga2
from .benchgen import BenchmarkSpec, generate
from .bsso import BssoParams, run_bsso
from .metrics import DegenerateMetricWarning, ReferenceFront, build_simulated_front, count_stats, gd, sp
from .model import ProblemInstance
from .pareto import ConstraintMode
from .record import RunRecord

log = logging.getLogger(__name__)

WORKERS_ENV = "PARETO_SCHED_WORKERS"

# (c_p, c_w) for algorithm ids 0..8; cumulative thresholds are (c_p, c_p + c_w)
BSSO_GRID: tuple[tuple[float, float], ...] = tuple(
    (cp, cw) for cp in (0.1, 0.3, 0.5) for cw in (0.1, 0.3, 0.5)
)
MOSSO_ID, MOPSO_ID, NSGA2_ID = 9, 10, 11
ALGORITHM_IDS = tuple(range(12))
ALGORITHM_NAMES = {**{i: f"BSSO{i}" for i in range(9)}, MOSSO_ID: "MOSSO", MOPSO_ID: "MOPSO", NSGA2_ID: "NSGA-II"}

METRICS = ("N_n", "N_p", "GD", "SP", "T", "F_e", "F_m")
# which direction wins when marking the best cell of a column
HIGHER_IS_BETTER = {"N_n": True, "N_p": True, "GD": False, "SP": False, "T": False, "F_e": False, "F_m": False}
SUMMARY_COLUMNS = [f"{stat}({m})" for m in METRICS for stat in ("Avg", "Std")]
SUMMARY_HEADER = ["instance", "n_sol", "alg", *SUMMARY_COLUMNS]


def make_params(
    alg_id: int,
    n_sol: int,
    n_gen: int,
    seed: int,
    constraint_mode: ConstraintMode | str = ConstraintMode.FEASIBILITY_FIRST,
    overrides: Mapping[str, Any] | None = None,
):
    """Parameter record and runner for an algorithm id (0-8 BSSO grid, 9 MOSSO, 10 MOPSO, 11 NSGA-II)."""
    common = dict(n_sol=n_sol, n_gen=n_gen, seed=seed, constraint_mode=ConstraintMode(constraint_mode))
    common.update(overrides or {})
    if 0 <= alg_id < len(BSSO_GRID):
        cp, cw = BSSO_GRID[alg_id]
        return run_bsso, BssoParams(**{"c_p": cp, "c_w": cw, **common})
    if alg_id == MOSSO_ID:
        return run_mosso, MossoParams(**common)
    if alg_id == MOPSO_ID:
        return run_mopso, MopsoParams(**common)
    if alg_id == NSGA2_ID:
        return run_nsga2, NsgaParams(**common)
    raise ValueError(f"unknown algorithm id {alg_id}")


def run_algorithm(
    alg_id: int,
    instance: ProblemInstance,
    n_sol: int,
    n_gen: int,
    seed: int,
    constraint_mode: ConstraintMode | str = ConstraintMode.FEASIBILITY_FIRST,
    overrides: Mapping[str, Any] | None = None,
    run_index: int = 0,
) -> RunRecord:
    runner, params = make_params(alg_id, n_sol, n_gen, seed, constraint_mode, overrides)
    record = runner(instance, params)
    if record.evaluations != n_sol * n_gen:
        raise RuntimeError(f"algorithm {alg_id} used {record.evaluations} evaluations, expected {n_sol * n_gen}")
    return record.with_meta(algorithm=alg_id, run_index=run_index)


def derive_seed(base_seed: int, instance_index: int, alg_id: int, n_sol: int, run_index: int) -> int:
    """Deterministic 64-bit per-run seed, independent of execution order."""
    ss = np.random.SeedSequence([base_seed, instance_index, alg_id, n_sol, run_index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


# -- plans ------------------------------------------------------------------


@dataclass
class ExperimentPlan:
    instances: list[ProblemInstance]
    algorithms: list[tuple[int, dict[str, Any]]]
    n_sol_values: list[int]
    n_gen: int
    n_run: int
    base_seed: int = 0
    constraint_mode: ConstraintMode = ConstraintMode.FEASIBILITY_FIRST

    def __post_init__(self) -> None:
        self.constraint_mode = ConstraintMode(self.constraint_mode)
        self.algorithms = [(a, {}) if isinstance(a, int) else (int(a[0]), dict(a[1])) for a in self.algorithms]
        if not self.instances or not self.algorithms or not self.n_sol_values:
            raise ValueError("plan needs at least one instance, algorithm and population size")
        if self.n_run < 1 or self.n_gen < 1:
            raise ValueError("n_run and n_gen must be positive")
        names = [inst.name for inst in self.instances]
        if len(set(names)) != len(names):
            raise ValueError("instance names in a plan must be unique")
        for alg_id, _ in self.algorithms:
            if alg_id not in ALGORITHM_IDS:
                raise ValueError(f"unknown algorithm id {alg_id}")

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any], base_dir: Path | None = None) -> "ExperimentPlan":
        try:
            instances = [_instance_from_plan_entry(e, base_dir) for e in doc["instances"]]
            algorithms = []
            for a in doc["algorithms"]:
                if isinstance(a, Mapping):
                    algorithms.append((int(a["id"]), dict(a.get("params", {}))))
                else:
                    algorithms.append((int(a), {}))
            return cls(
                instances=instances,
                algorithms=algorithms,
                n_sol_values=[int(n) for n in doc["nsol"]],
                n_gen=int(doc["ngen"]),
                n_run=int(doc["nrun"]),
                base_seed=int(doc.get("seed", 0)),
                constraint_mode=doc.get("constraint_mode", ConstraintMode.FEASIBILITY_FIRST.value),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed plan: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentPlan":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text(encoding="utf-8")), path.parent)

    def cells(self) -> Iterator["RunTask"]:
        for i, inst in enumerate(self.instances):
            for alg_id, overrides in self.algorithms:
                for n_sol in self.n_sol_values:
                    for run in range(self.n_run):
                        yield RunTask(
                            instance=inst,
                            alg_id=alg_id,
                            overrides=overrides,
                            n_sol=n_sol,
                            n_gen=self.n_gen,
                            run_index=run,
                            seed=derive_seed(self.base_seed, i, alg_id, n_sol, run),
                            constraint_mode=self.constraint_mode.value,
                        )


def _instance_from_plan_entry(entry: Any, base_dir: Path | None) -> ProblemInstance:
    if isinstance(entry, str):
        path = Path(entry)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return ProblemInstance.load(path)
    if isinstance(entry.get("tasks"), list):
        return ProblemInstance.from_dict(entry)
    spec = BenchmarkSpec(
        n_tasks=int(entry["tasks"]),
        n_cpus=int(entry["cpus"]),
        deadline=float(entry.get("deadline", 30.0)),
        seed=int(entry.get("seed", 0)),
    )
    inst = generate(spec)
    if "name" in entry:
        inst = ProblemInstance.from_dict({**inst.to_dict(), "name": entry["name"]})
    return inst


def default_plan_path() -> Path:
    return Path(__file__).with_name("plans") / "desk.json"


@dataclass(frozen=True)
class RunTask:
    instance: ProblemInstance
    alg_id: int
    overrides: dict[str, Any]
    n_sol: int
    n_gen: int
    run_index: int
    seed: int
    constraint_mode: str

    def execute(self) -> RunRecord:
        return run_algorithm(
            self.alg_id,
            self.instance,
            self.n_sol,
            self.n_gen,
            self.seed,
            self.constraint_mode,
            self.overrides,
            self.run_index,
        )

    @property
    def key(self) -> tuple:
        return (self.instance.name, self.alg_id, self.n_sol, self.run_index)


def _execute(task: RunTask) -> RunRecord:
    return task.execute()


def worker_count(workers: int | None = None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    return max(1, workers)


def cell_filename(instance: str, alg_id: int | str, n_sol: int) -> str:
    safe = re.sub(r"[^A-Za-z0-9_.-]", "_", instance)
    return f"{safe}__alg{alg_id}__nsol{n_sol}.jsonl"


def run_plan(
    plan: ExperimentPlan,
    out_dir: str | Path | None = None,
    workers: int | None = None,
    progress: Callable[[RunRecord], None] | None = None,
) -> list[RunRecord]:
    """Execute every (instance, algorithm, n_sol, run) cell.

    With ``out_dir`` each record is appended to its cell's JSON-lines file as
    soon as it completes; runs already present there are skipped.
    """
    tasks = list(plan.cells())
    done: dict[tuple, RunRecord] = {}
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        inst_dir = out_dir / "instances"
        inst_dir.mkdir(exist_ok=True)
        for inst in plan.instances:
            inst.save(inst_dir / f"{inst.name}.json")
        for rec in load_records(out_dir):
            done[(rec.instance, rec.algorithm, rec.n_sol, rec.run_index)] = rec
    pending = [t for t in tasks if t.key not in done]

    def sink(record: RunRecord) -> None:
        if out_dir is not None:
            path = out_dir / cell_filename(record.instance, record.algorithm, record.n_sol)
            with path.open("a", encoding="utf-8") as fh:
                fh.write(record.to_json() + "\n")
        done[(record.instance, record.algorithm, record.n_sol, record.run_index)] = record
        if progress is not None:
            progress(record)

    n_workers = worker_count(workers)
    if n_workers == 1 or len(pending) <= 1:
        for task in pending:
            sink(task.execute())
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            for record in pool.map(_execute, pending, chunksize=max(1, len(pending) // (8 * n_workers))):
                sink(record)
    return [done[t.key] for t in tasks]


def load_records(results_dir: str | Path) -> list[RunRecord]:
    records = []
    for path in sorted(Path(results_dir).glob("*.jsonl")):
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    records.append(RunRecord.from_json(line))
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return records


# -- scoring ----------------------------------------------------------------


@dataclass
class RunScore:
    record: RunRecord
    n_n: int
    n_p: int
    gd: float
    sp: float

    def values(self) -> dict[str, float]:
        return {
            "N_n": self.n_n,
            "N_p": self.n_p,
            "GD": self.gd,
            "SP": self.sp,
            "T": self.record.seconds,
            "F_e": self.record.mean_energy,
            "F_m": self.record.mean_makespan,
        }


@dataclass
class SummaryRow:
    instance: str
    n_sol: int
    algorithm: int | str
    n_runs: int
    avg: dict[str, float]
    std: dict[str, float]
    is_best: dict[str, bool] = field(default_factory=dict)

    def as_csv_row(self) -> list:
        row: list = [self.instance, self.n_sol, self.algorithm]
        for m in METRICS:
            row += [self.avg[m], self.std[m]]
        return row


def pooled_fronts(records: Iterable[RunRecord]) -> dict[str, ReferenceFront]:
    by_instance: dict[str, list] = {}
    for rec in records:
        by_instance.setdefault(rec.instance, []).append(rec.archive)
    return {name: build_simulated_front(archives) for name, archives in by_instance.items()}


def score_records(
    records: Sequence[RunRecord],
    fronts: Mapping[str, ReferenceFront] | ReferenceFront | None = None,
    tol: float = 1e-9,
) -> list[RunScore]:
    """Per-run metrics; ``fronts=None`` pools a front per instance from the records themselves."""
    if fronts is None:
        fronts = pooled_fronts(records)
    scores = []
    for rec in records:
        front = fronts if isinstance(fronts, ReferenceFront) else fronts[rec.instance]
        n_n, n_p = count_stats(rec.archive, front, tol)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateMetricWarning)
            spacing = sp(rec.archive, front)
        scores.append(RunScore(rec, n_n, n_p, gd(rec.archive, front), spacing))
    return scores


def _sample_std(values: np.ndarray) -> float:
    return float(np.std(values, ddof=1)) if len(values) > 1 else 0.0


def summarize(scores: Sequence[RunScore]) -> list[SummaryRow]:
    cells: dict[tuple, list[RunScore]] = {}
    for s in scores:
        cells.setdefault((s.record.instance, s.record.n_sol, s.record.algorithm), []).append(s)
    rows = []
    for (instance, n_sol, alg), members in cells.items():
        table = {m: np.array([s.values()[m] for s in members], dtype=float) for m in METRICS}
        rows.append(
            SummaryRow(
                instance=instance,
                n_sol=n_sol,
                algorithm=alg,
                n_runs=len(members),
                avg={m: float(v.mean()) for m, v in table.items()},
                std={m: _sample_std(v) for m, v in table.items()},
            )
        )
    rows.sort(key=lambda r: (r.instance, r.n_sol, _alg_sort_key(r.algorithm)))
    mark_best(rows)
    return rows


def _alg_sort_key(alg) -> tuple:
    return (0, int(alg), "") if isinstance(alg, (int, np.integer)) or str(alg).isdigit() else (1, 0, str(alg))


def mark_best(rows: Sequence[SummaryRow]) -> None:
    """Flag the best Avg value of every metric within each (instance, n_sol) group."""
    groups: dict[tuple, list[SummaryRow]] = {}
    for row in rows:
        groups.setdefault((row.instance, row.n_sol), []).append(row)
    for members in groups.values():
        for m in METRICS:
            vals = [r.avg[m] for r in members]
            finite = [v for v in vals if not math.isnan(v)]
            if not finite:
                continue
            target = max(finite) if HIGHER_IS_BETTER[m] else min(finite)
            for r in members:
                r.is_best[m] = r.avg[m] == target


def score_and_summarize(
    records: Sequence[RunRecord],
    fronts: Mapping[str, ReferenceFront] | ReferenceFront | None = None,
    tol: float = 1e-9,
) -> list[SummaryRow]:
    if not records:
        raise ValueError("no records to summarise")
    return summarize(score_records(records, fronts, tol))


def summary_to_csv(rows: Sequence[SummaryRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_HEADER)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row.as_csv_row()])
    return buf.getvalue()


def summary_from_csv(text: str) -> list[SummaryRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != SUMMARY_HEADER:
        raise ValueError(f"unexpected summary CSV header: {header}")
    rows = []
    for r in reader:
        if not r:
            continue
        values = [float(v) for v in r[3:]]
        alg: int | str = int(r[2]) if r[2].isdigit() else r[2]
        rows.append(
            SummaryRow(
                instance=r[0],
                n_sol=int(r[1]),
                algorithm=alg,
                n_runs=0,
                avg={m: values[2 * i] for i, m in enumerate(METRICS)},
                std={m: values[2 * i + 1] for i, m in enumerate(METRICS)},
            )
        )
    mark_best(rows)
    return rows


def render_table(rows: Sequence[SummaryRow], digits: int = 4) -> str:
    """Fixed-width text table in the column order of the result tables; '*' marks the best Avg."""
    header = ["instance", "N_sol", "Alg", *SUMMARY_COLUMNS]
    body = []
    for row in rows:
        cells = [row.instance, str(row.n_sol), str(row.algorithm)]
        for m in METRICS:
            mark = "*" if row.is_best.get(m) else ""
            cells.append(f"{row.avg[m]:.{digits}g}{mark}")
            cells.append(f"{row.std[m]:.{digits}g}")
        body.append(cells)
    widths = [max(len(h), *(len(b[i]) for b in body)) if body else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.rjust(w) for c, w in zip(cells, widths)) for cells in body]
    return "\n".join(lines)
