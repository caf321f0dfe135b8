"""Independent-task cloud scheduling model: instances, schedules, objectives.

Schedules are stored 0-based internally (numpy int arrays) and converted to
1-based processor indices only at serialization boundaries.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np


@dataclass(frozen=True)
class ProblemInstance:
    task_sizes: tuple[float, ...]
    cpu_speeds: tuple[float, ...]
    cpu_energies: tuple[float, ...]
    deadline: float
    name: str = "instance"
    meta: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "task_sizes", tuple(float(s) for s in self.task_sizes))
        object.__setattr__(self, "cpu_speeds", tuple(float(s) for s in self.cpu_speeds))
        object.__setattr__(self, "cpu_energies", tuple(float(e) for e in self.cpu_energies))
        object.__setattr__(self, "deadline", float(self.deadline))
        if not self.task_sizes:
            raise ValueError("instance needs at least one task")
        if not self.cpu_speeds:
            raise ValueError("instance needs at least one processor")
        if len(self.cpu_speeds) != len(self.cpu_energies):
            raise ValueError("cpu_speeds and cpu_energies differ in length")
        if min(self.task_sizes) <= 0 or min(self.cpu_speeds) <= 0 or min(self.cpu_energies) <= 0:
            raise ValueError("task sizes, speeds and energies must be positive")
        if not self.deadline > 0:
            raise ValueError("deadline must be positive")
        times = np.asarray(self.task_sizes)[:, None] / np.asarray(self.cpu_speeds)[None, :]
        times.setflags(write=False)
        energies = np.asarray(self.cpu_energies)
        energies.setflags(write=False)
        object.__setattr__(self, "_times", times)
        object.__setattr__(self, "_energies", energies)

    @property
    def n_tasks(self) -> int:
        return len(self.task_sizes)

    @property
    def n_cpus(self) -> int:
        return len(self.cpu_speeds)

    @property
    def times(self) -> np.ndarray:
        """Processing-time matrix, shape (n_tasks, n_cpus)."""
        return self._times

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "name": self.name,
            "deadline": self.deadline,
            "tasks": list(self.task_sizes),
            "cpus": [{"speed": s, "energy": e} for s, e in zip(self.cpu_speeds, self.cpu_energies)],
        }
        if self.meta:
            doc["meta"] = dict(self.meta)
        return doc

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "ProblemInstance":
        try:
            cpus = doc["cpus"]
            return cls(
                task_sizes=doc["tasks"],
                cpu_speeds=[c["speed"] for c in cpus],
                cpu_energies=[c["energy"] for c in cpus],
                deadline=doc["deadline"],
                name=str(doc.get("name", "instance")),
                meta=dict(doc.get("meta", {})),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed instance document: {exc}") from exc

    def to_json(self) -> str:
        # json emits repr() floats, which round-trip exactly
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ProblemInstance":
        return cls.from_dict(json.loads(text))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "ProblemInstance":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class ObjectivePoint:
    energy: float
    makespan: float
    feasible: bool

    def as_tuple(self) -> tuple[float, float]:
        return (self.energy, self.makespan)


def as_schedule(instance: ProblemInstance, assignment: Sequence[int] | np.ndarray) -> np.ndarray:
    """Validate a 0-based assignment vector and return it as a read-only int array."""
    x = np.array(assignment, dtype=np.int64)
    if x.ndim != 1 or x.shape[0] != instance.n_tasks:
        raise ValueError(f"schedule length {x.shape} does not match {instance.n_tasks} tasks")
    if x.size and (x.min() < 0 or x.max() >= instance.n_cpus):
        raise ValueError("schedule contains an out-of-range processor index")
    x.setflags(write=False)
    return x


def schedule_from_1based(instance: ProblemInstance, assignment: Sequence[int]) -> np.ndarray:
    return as_schedule(instance, np.asarray(assignment, dtype=np.int64) - 1)


def schedule_to_1based(schedule: np.ndarray) -> list[int]:
    return [int(v) + 1 for v in schedule]


def processing_time(instance: ProblemInstance, task: int, cpu: int) -> float:
    """Time to run ``task`` on ``cpu``; both indices are 1-based."""
    if not 1 <= task <= instance.n_tasks:
        raise IndexError(f"task index {task} out of range 1..{instance.n_tasks}")
    if not 1 <= cpu <= instance.n_cpus:
        raise IndexError(f"cpu index {cpu} out of range 1..{instance.n_cpus}")
    return instance.task_sizes[task - 1] / instance.cpu_speeds[cpu - 1]


def evaluate_batch(instance: ProblemInstance, population: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Objectives for a (P, n_tasks) matrix of 0-based assignments.

    Returns ``(objectives, feasible)`` where ``objectives`` has columns
    (energy, makespan).
    """
    pop = np.asarray(population, dtype=np.int64)
    if pop.ndim != 2 or pop.shape[1] != instance.n_tasks:
        raise ValueError(f"population shape {pop.shape} incompatible with {instance.n_tasks} tasks")
    n_pop, n_tasks = pop.shape
    n_cpus = instance.n_cpus
    if pop.size and (pop.min() < 0 or pop.max() >= n_cpus):
        raise ValueError("population contains an out-of-range processor index")
    t = instance.times[np.arange(n_tasks)[None, :], pop]
    energy = (t * instance._energies[pop]).sum(axis=1)
    offsets = pop + (np.arange(n_pop) * n_cpus)[:, None]
    loads = np.bincount(offsets.ravel(), weights=t.ravel(), minlength=n_pop * n_cpus)
    makespan = loads.reshape(n_pop, n_cpus).max(axis=1)
    objectives = np.column_stack([energy, makespan])
    return objectives, makespan <= instance.deadline


def evaluate(instance: ProblemInstance, schedule: Sequence[int] | np.ndarray) -> ObjectivePoint:
    """Objectives of a single 0-based schedule (same arithmetic as the batch path)."""
    x = as_schedule(instance, schedule)
    obj, feas = evaluate_batch(instance, x[None, :])
    return ObjectivePoint(float(obj[0, 0]), float(obj[0, 1]), bool(feas[0]))


def random_population(instance: ProblemInstance, n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, instance.n_cpus, size=(n, instance.n_tasks), dtype=np.int64)


def random_schedule(instance: ProblemInstance, rng: np.random.Generator) -> np.ndarray:
    return random_population(instance, 1, rng)[0]


class BudgetExceeded(RuntimeError):
    pass


class CountingEvaluator:
    """Evaluation wrapper that counts fitness calls and enforces a hard budget."""

    def __init__(self, instance: ProblemInstance, budget: int | None = None):
        self.instance = instance
        self.budget = budget
        self.calls = 0

    def __call__(self, population: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        n = len(population)
        if self.budget is not None and self.calls + n > self.budget:
            raise BudgetExceeded(
                f"evaluation budget {self.budget} exceeded ({self.calls} used, {n} requested)"
            )
        self.calls += n
        return evaluate_batch(self.instance, population)
