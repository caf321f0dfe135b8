"""Seeded generator for the small/medium/large benchmark classes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ProblemInstance

SPEED_MIN = 1000.0
SPEED_MAX = 10000.0
SIZE_MIN = 5000.0
SIZE_MAX = 15000.0
ENERGY_AT_MIN_SPEED = 0.3
ENERGY_DEGREE = 2

STANDARD_SIZES = {"small": (20, 5), "medium": (50, 10), "large": (100, 20)}


@dataclass(frozen=True)
class BenchmarkSpec:
    n_tasks: int
    n_cpus: int
    deadline: float = 30.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_tasks < 1:
            raise ValueError("n_tasks must be >= 1")
        if self.n_cpus < 2:
            raise ValueError("n_cpus must be >= 2 to realise the 10x speed ratio")
        if not self.deadline > 0:
            raise ValueError("deadline must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def name(self) -> str:
        return f"t{self.n_tasks}c{self.n_cpus}s{self.seed}"


def energy_rate(speed: np.ndarray | float) -> np.ndarray | float:
    """Energy per unit time as a quadratic in speed: 1000 -> 0.3, 10000 -> 30."""
    return ENERGY_AT_MIN_SPEED * (np.asarray(speed) / SPEED_MIN) ** ENERGY_DEGREE


def generate(spec: BenchmarkSpec) -> ProblemInstance:
    rng = np.random.default_rng(spec.seed)
    speeds = rng.uniform(SPEED_MIN, SPEED_MAX, size=spec.n_cpus)
    # pin one processor at each end of the range so max/min == 10 exactly
    fast, slow = rng.choice(spec.n_cpus, size=2, replace=False)
    speeds[fast] = SPEED_MAX
    speeds[slow] = SPEED_MIN
    sizes = rng.uniform(SIZE_MIN, SIZE_MAX, size=spec.n_tasks)
    return ProblemInstance(
        task_sizes=sizes.tolist(),
        cpu_speeds=speeds.tolist(),
        cpu_energies=energy_rate(speeds).tolist(),
        deadline=spec.deadline,
        name=spec.name,
        meta={
            "seed": spec.seed,
            "energy_model": f"{ENERGY_AT_MIN_SPEED}*(speed/{SPEED_MIN:g})^{ENERGY_DEGREE}",
        },
    )


def standard_spec(size: str, seed: int = 0, deadline: float = 30.0) -> BenchmarkSpec:
    n_tasks, n_cpus = STANDARD_SIZES[size]
    return BenchmarkSpec(n_tasks, n_cpus, deadline, seed)
