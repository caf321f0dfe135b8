from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Any

import numpy as np

from .pareto import Archive


@dataclass(frozen=True, eq=False)
class RunRecord:
    """Outcome of one optimisation run."""

    algorithm: int | str
    instance: str
    n_sol: int
    n_gen: int
    seed: int
    archive: Archive
    evaluations: int
    seconds: float
    constraint_mode: str
    run_index: int = 0

    @property
    def mean_energy(self) -> float:
        return float(self.archive.objectives[:, 0].mean()) if len(self.archive) else float("nan")

    @property
    def mean_makespan(self) -> float:
        return float(self.archive.objectives[:, 1].mean()) if len(self.archive) else float("nan")

    def with_meta(self, **changes: Any) -> "RunRecord":
        return replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "instance": self.instance,
            "n_sol": self.n_sol,
            "n_gen": self.n_gen,
            "run_index": self.run_index,
            "seed": self.seed,
            "constraint_mode": self.constraint_mode,
            "evaluations": self.evaluations,
            "seconds": self.seconds,
            "mean_energy": self.mean_energy,
            "mean_makespan": self.mean_makespan,
            "capacity": self.archive.capacity,
            "archive": self.archive.to_rows(),
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "RunRecord":
        try:
            return cls(
                algorithm=doc["algorithm"],
                instance=doc["instance"],
                n_sol=int(doc["n_sol"]),
                n_gen=int(doc["n_gen"]),
                seed=int(doc["seed"]),
                archive=Archive.from_rows(doc["archive"], int(doc["capacity"])),
                evaluations=int(doc["evaluations"]),
                seconds=float(doc["seconds"]),
                constraint_mode=doc["constraint_mode"],
                run_index=int(doc.get("run_index", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed run record: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "RunRecord":
        return cls.from_dict(json.loads(line))

    def same_result(self, other: "RunRecord") -> bool:
        """Bit-identical comparison of everything except wall-clock time."""
        return (
            self.algorithm == other.algorithm
            and self.instance == other.instance
            and self.n_sol == other.n_sol
            and self.n_gen == other.n_gen
            and self.seed == other.seed
            and self.run_index == other.run_index
            and self.constraint_mode == other.constraint_mode
            and self.evaluations == other.evaluations
            and self.archive.capacity == other.archive.capacity
            and np.array_equal(self.archive.schedules, other.archive.schedules)
            and self.archive.objectives.tobytes() == other.archive.objectives.tobytes()
            and np.array_equal(self.archive.feasible, other.archive.feasible)
        )
