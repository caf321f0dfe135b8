"""Bi-objective simplified swarm optimisation (BSSO).

Each generation every parent is rebuilt coordinate by coordinate: copy from a
randomly chosen archive member, keep its own value, or draw a fresh processor.
Parents for the next generation come from the current nondominated set,
truncated by crowding when oversized and padded at random when undersized.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from .model import CountingEvaluator, ProblemInstance, random_population
from .pareto import (
    Archive,
    ArchiveEntry,
    ConstraintMode,
    group_compare_indices,
    nondominated_indices,
    truncate_indices,
)
from .record import RunRecord

Observer = Callable[[dict[str, Any]], None]


@dataclass(frozen=True)
class BssoParams:
    c_p: float = 0.5
    c_w: float = 0.5
    n_sol: int = 50
    n_gen: int = 1000
    n_non: int | None = None
    constraint_mode: ConstraintMode = ConstraintMode.FEASIBILITY_FIRST
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "constraint_mode", ConstraintMode(self.constraint_mode))
        if self.n_non is None:
            object.__setattr__(self, "n_non", self.n_sol)
        if not (0 <= self.c_p <= 1 and 0 <= self.c_w <= 1):
            raise ValueError("c_p and c_w must lie in [0, 1]")
        if self.c_p + self.c_w > 1 + 1e-12:
            raise ValueError("c_p + c_w must not exceed 1")
        if self.n_sol < 1 or self.n_gen < 1 or self.n_non < 1:
            raise ValueError("n_sol, n_gen and n_non must be positive")

    @property
    def threshold_copy(self) -> float:
        return self.c_p

    @property
    def threshold_keep(self) -> float:
        return self.c_p + self.c_w

    @property
    def c_r(self) -> float:
        return max(0.0, 1.0 - self.c_p - self.c_w)


def update_population(
    current: np.ndarray,
    exemplars: np.ndarray,
    threshold_copy: float,
    threshold_keep: float,
    n_cpus: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Stepwise update of every coordinate of every row.

    rho < threshold_copy takes the exemplar's value, rho < threshold_keep keeps
    the current value, anything else gets a fresh random processor.
    """
    rho = rng.random(current.shape)
    fresh = rng.integers(0, n_cpus, size=current.shape)
    return np.where(rho < threshold_copy, exemplars, np.where(rho < threshold_keep, current, fresh))


def update_solution(
    current: np.ndarray,
    exemplar: np.ndarray,
    params: BssoParams,
    rng: np.random.Generator,
    n_cpus: int,
) -> np.ndarray:
    current = np.asarray(current)
    exemplar = np.asarray(exemplar)
    if current.shape != exemplar.shape:
        raise ValueError("current and exemplar differ in length")
    return update_population(
        current[None, :], exemplar[None, :], params.threshold_copy, params.threshold_keep, n_cpus, rng
    )[0]


def select_exemplar(archive: Archive, rng: np.random.Generator) -> np.ndarray:
    if len(archive) == 0:
        raise RuntimeError("cannot select an exemplar from an empty archive")
    return archive.schedules[rng.integers(len(archive))]


def hybrid_select_indices(
    front_idx: np.ndarray,
    pool_obj: np.ndarray,
    n_sol: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, int]:
    """Pick ``n_sol`` pool indices: the front first, crowding-truncated or randomly padded.

    Returns the chosen indices (front members first) and how many of them are
    front members.
    """
    front_idx = np.asarray(front_idx, dtype=np.int64)
    pool_size = len(pool_obj)
    if pool_size < n_sol:
        raise ValueError(f"pool of {pool_size} cannot supply {n_sol} parents")
    if len(front_idx) >= n_sol:
        return front_idx[truncate_indices(pool_obj[front_idx], n_sol)], n_sol
    rest = np.setdiff1d(np.arange(pool_size), front_idx)
    fill = rng.choice(rest, size=n_sol - len(front_idx), replace=False)
    return np.concatenate([front_idx, fill]), len(front_idx)


def hybrid_elite_select(
    front: Sequence[ArchiveEntry],
    pool: Sequence[ArchiveEntry],
    n_sol: int,
    rng: np.random.Generator,
) -> list[ArchiveEntry]:
    """Entry-level hybrid elite selection; ``front`` members are located in ``pool`` by identity."""
    pool = list(pool)
    position = {id(e): i for i, e in enumerate(pool)}
    try:
        front_idx = np.array([position[id(e)] for e in front], dtype=np.int64)
    except KeyError:
        raise ValueError("every front entry must be an element of the pool") from None
    pool_obj = np.array([[e.point.energy, e.point.makespan] for e in pool], dtype=float).reshape(-1, 2)
    chosen, _ = hybrid_select_indices(front_idx, pool_obj, n_sol, rng)
    return [pool[i] for i in chosen]


def run_bsso(instance: ProblemInstance, params: BssoParams, observer: Observer | None = None) -> RunRecord:
    rng = np.random.default_rng(params.seed)
    mode = params.constraint_mode
    n_sol = params.n_sol
    evaluate = CountingEvaluator(instance, budget=n_sol * params.n_gen)
    start = time.perf_counter()

    pop = random_population(instance, n_sol, rng)
    obj, feas = evaluate(pop)
    front = nondominated_indices(obj, feas, mode)
    if len(front) > params.n_non:
        front = front[truncate_indices(obj[front], params.n_non)]

    # the initial population counts towards the n_sol * n_gen budget
    for t in range(2, params.n_gen + 1):
        exemplars = pop[front[rng.integers(0, len(front), size=n_sol)]]
        offspring = update_population(
            pop, exemplars, params.threshold_copy, params.threshold_keep, instance.n_cpus, rng
        )
        off_obj, off_feas = evaluate(offspring)

        pool = np.concatenate([pop, offspring])
        pool_obj = np.concatenate([obj, off_obj])
        pool_feas = np.concatenate([feas, off_feas])
        lookup = np.concatenate([front, n_sol + np.arange(n_sol)])
        merged = lookup[group_compare_indices(obj[front], feas[front], off_obj, off_feas, mode)]
        if observer is not None:
            observer(
                {
                    "generation": t,
                    "previous_front": obj[front],
                    "previous_feasible": feas[front],
                    "offspring": off_obj,
                    "offspring_feasible": off_feas,
                    "front": pool_obj[merged],
                    "front_feasible": pool_feas[merged],
                    "parents": pop,
                    "exemplars": exemplars,
                    "children": offspring,
                }
            )

        chosen, n_elite = hybrid_select_indices(merged, pool_obj, n_sol, rng)
        pop, obj, feas = pool[chosen], pool_obj[chosen], pool_feas[chosen]
        front = np.arange(n_elite)
        if n_elite > params.n_non:
            front = front[truncate_indices(obj[front], params.n_non)]

    archive = Archive.from_population(pop[front], obj[front], feas[front], params.n_non, mode)
    return RunRecord(
        algorithm="bsso",
        instance=instance.name,
        n_sol=n_sol,
        n_gen=params.n_gen,
        seed=params.seed,
        archive=archive,
        evaluations=evaluate.calls,
        seconds=time.perf_counter() - start,
        constraint_mode=mode.value,
    )
