"""Comparison algorithms: NSGA-II, MOPSO and MOSSO on the assignment encoding.

All three share BSSO's evaluation budget (n_sol * n_gen fitness calls,
initial population included) and return the same ``RunRecord``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .model import CountingEvaluator, ProblemInstance, random_population
from .pareto import (
    Archive,
    ConstraintMode,
    dominance_matrix,
    dominates_rows,
    group_compare_indices,
    nondominated_indices,
    truncate_indices,
)
from .record import RunRecord

Observer = Callable[[dict[str, Any]], None]


def _check_common(n_sol: int, n_gen: int, n_non: int) -> None:
    if n_sol < 1 or n_gen < 1 or n_non < 1:
        raise ValueError("n_sol, n_gen and n_non must be positive")


@dataclass(frozen=True)
class NsgaParams:
    crossover_rate: float = 0.7
    mutation_rate: float = 0.3
    n_sol: int = 50
    n_gen: int = 1000
    n_non: int | None = None
    constraint_mode: ConstraintMode = ConstraintMode.FEASIBILITY_FIRST
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "constraint_mode", ConstraintMode(self.constraint_mode))
        if self.n_non is None:
            object.__setattr__(self, "n_non", self.n_sol)
        if not (0 <= self.crossover_rate <= 1 and 0 <= self.mutation_rate <= 1):
            raise ValueError("rates must lie in [0, 1]")
        _check_common(self.n_sol, self.n_gen, self.n_non)


@dataclass(frozen=True)
class MopsoParams:
    w: float = 0.871111
    c1: float = 1.496180
    c2: float = 1.496180
    n_sol: int = 50
    n_gen: int = 1000
    n_non: int | None = None
    constraint_mode: ConstraintMode = ConstraintMode.FEASIBILITY_FIRST
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "constraint_mode", ConstraintMode(self.constraint_mode))
        if self.n_non is None:
            object.__setattr__(self, "n_non", self.n_sol)
        if self.w < 0 or self.c1 < 0 or self.c2 < 0:
            raise ValueError("w, c1 and c2 must be nonnegative")
        _check_common(self.n_sol, self.n_gen, self.n_non)


@dataclass(frozen=True)
class MossoParams:
    n_sol: int = 50
    n_gen: int = 1000
    n_non: int | None = None
    constraint_mode: ConstraintMode = ConstraintMode.FEASIBILITY_FIRST
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "constraint_mode", ConstraintMode(self.constraint_mode))
        if self.n_non is None:
            object.__setattr__(self, "n_non", self.n_sol)
        _check_common(self.n_sol, self.n_gen, self.n_non)

    def thresholds(self, t: float) -> tuple[float, float, float]:
        """Cumulative (leader, pbest, keep) thresholds at generation ``t``."""
        frac = t / self.n_gen
        return 0.1 + 0.3 * frac, 0.3 + 0.4 * frac, 0.4 + 0.5 * frac


class _Repository:
    """External archive maintained by group comparison plus crowding truncation."""

    def __init__(self, schedules, obj, feas, capacity: int, mode: ConstraintMode):
        self.capacity = capacity
        self.mode = mode
        idx = nondominated_indices(obj, feas, mode)
        idx = idx[truncate_indices(obj[idx], capacity)]
        self.schedules, self.obj, self.feas = schedules[idx], obj[idx], feas[idx]

    def update(self, schedules, obj, feas) -> None:
        idx = group_compare_indices(self.obj, self.feas, obj, feas, self.mode)
        all_obj = np.concatenate([self.obj, obj])
        idx = idx[truncate_indices(all_obj[idx], self.capacity)]
        self.schedules = np.concatenate([self.schedules, schedules])[idx]
        self.obj = all_obj[idx]
        self.feas = np.concatenate([self.feas, feas])[idx]

    def draw(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return self.schedules[rng.integers(0, len(self.obj), size=n)]

    def to_archive(self) -> Archive:
        return Archive.from_population(self.schedules, self.obj, self.feas, self.capacity, self.mode)


def _record(name: str, instance: ProblemInstance, params, archive: Archive, calls: int, start: float) -> RunRecord:
    return RunRecord(
        algorithm=name,
        instance=instance.name,
        n_sol=params.n_sol,
        n_gen=params.n_gen,
        seed=params.seed,
        archive=archive,
        evaluations=calls,
        seconds=time.perf_counter() - start,
        constraint_mode=params.constraint_mode.value,
    )


# -- NSGA-II ----------------------------------------------------------------


def fast_nondominated_sort(obj: np.ndarray, feas: np.ndarray, mode: ConstraintMode) -> np.ndarray:
    """Front rank (0 = first front) of every point, by domination counting."""
    dom = dominance_matrix(np.asarray(obj, dtype=float), np.asarray(feas, dtype=bool), mode)
    n = len(obj)
    counts = dom.sum(axis=0)
    rank = np.full(n, -1, dtype=np.int64)
    current = np.flatnonzero(counts == 0)
    level = 0
    while current.size:
        rank[current] = level
        counts = counts - dom[current].sum(axis=0)
        current = np.flatnonzero((counts == 0) & (rank < 0))
        level += 1
    return rank


def nsga_crowding(obj: np.ndarray) -> np.ndarray:
    """Classic cuboid crowding distance of one front; boundary points get inf."""
    n = len(obj)
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
        return dist
    for col in range(obj.shape[1]):
        order = np.argsort(obj[:, col], kind="stable")
        v = obj[order, col]
        span = v[-1] - v[0]
        dist[order[0]] = dist[order[-1]] = np.inf
        if span > 0:
            dist[order[1:-1]] += (v[2:] - v[:-2]) / span
    return dist


def _rank_and_crowd(obj, feas, mode):
    rank = fast_nondominated_sort(obj, feas, mode)
    crowd = np.zeros(len(obj))
    for level in range(rank.max() + 1):
        members = np.flatnonzero(rank == level)
        crowd[members] = nsga_crowding(obj[members])
    return rank, crowd


def _tournament(rank, crowd, n: int, rng: np.random.Generator) -> np.ndarray:
    a, b = rng.integers(0, len(rank), size=(2, n))
    coin = rng.random(n) < 0.5
    a_better = (rank[a] < rank[b]) | ((rank[a] == rank[b]) & (crowd[a] > crowd[b]))
    b_better = (rank[b] < rank[a]) | ((rank[a] == rank[b]) & (crowd[b] > crowd[a]))
    return np.where(a_better, a, np.where(b_better, b, np.where(coin, a, b)))


def run_nsga2(instance: ProblemInstance, params: NsgaParams, observer: Observer | None = None) -> RunRecord:
    rng = np.random.default_rng(params.seed)
    mode = params.constraint_mode
    n_sol, n_var, n_cpus = params.n_sol, instance.n_tasks, instance.n_cpus
    evaluate = CountingEvaluator(instance, budget=n_sol * params.n_gen)
    start = time.perf_counter()

    pop = random_population(instance, n_sol, rng)
    obj, feas = evaluate(pop)
    rank, crowd = _rank_and_crowd(obj, feas, mode)
    n_pairs = (n_sol + 1) // 2
    gene_rate = params.mutation_rate / n_var

    for t in range(2, params.n_gen + 1):
        mates = pop[_tournament(rank, crowd, 2 * n_pairs, rng)].reshape(n_pairs, 2, n_var)
        p1, p2 = mates[:, 0], mates[:, 1]
        cross = (rng.random(n_pairs) < params.crossover_rate)[:, None]
        mask = rng.random((n_pairs, n_var)) < 0.5
        swap = cross & mask
        c1 = np.where(swap, p2, p1)
        c2 = np.where(swap, p1, p2)
        children = np.concatenate([c1, c2])[:n_sol]
        mutate = rng.random(children.shape) < gene_rate
        children = np.where(mutate, rng.integers(0, n_cpus, size=children.shape), children)
        c_obj, c_feas = evaluate(children)

        all_pop = np.concatenate([pop, children])
        all_obj = np.concatenate([obj, c_obj])
        all_feas = np.concatenate([feas, c_feas])
        all_rank, all_crowd = _rank_and_crowd(all_obj, all_feas, mode)
        keep = np.lexsort((np.arange(len(all_obj)), -all_crowd, all_rank))[:n_sol]
        pop, obj, feas = all_pop[keep], all_obj[keep], all_feas[keep]
        rank, crowd = _rank_and_crowd(obj, feas, mode)
        if observer is not None:
            observer({"generation": t, "population": obj, "rank": rank})

    archive = Archive.from_population(pop, obj, feas, params.n_non, mode)
    return _record("nsga2", instance, params, archive, evaluate.calls, start)


# -- MOPSO ------------------------------------------------------------------


def run_mopso(instance: ProblemInstance, params: MopsoParams, observer: Observer | None = None) -> RunRecord:
    rng = np.random.default_rng(params.seed)
    mode = params.constraint_mode
    n_sol, n_cpus = params.n_sol, instance.n_cpus
    evaluate = CountingEvaluator(instance, budget=n_sol * params.n_gen)
    start = time.perf_counter()

    pos = random_population(instance, n_sol, rng)
    vel = np.zeros(pos.shape)
    obj, feas = evaluate(pos)
    pbest, pbest_obj, pbest_feas = pos.copy(), obj.copy(), feas.copy()
    repo = _Repository(pos, obj, feas, params.n_non, mode)

    for t in range(2, params.n_gen + 1):
        leaders = repo.draw(n_sol, rng)
        r1 = rng.random(pos.shape)
        r2 = rng.random(pos.shape)
        vel = params.w * vel + params.c1 * r1 * (pbest - pos) + params.c2 * r2 * (leaders - pos)
        pos = np.clip(np.rint(pos + vel), 0, n_cpus - 1).astype(np.int64)
        obj, feas = evaluate(pos)

        better = dominates_rows(obj, feas, pbest_obj, pbest_feas, mode)
        worse = dominates_rows(pbest_obj, pbest_feas, obj, feas, mode)
        coin = rng.random(n_sol) < 0.5
        replace = better | (~worse & coin)
        pbest[replace], pbest_obj[replace], pbest_feas[replace] = pos[replace], obj[replace], feas[replace]
        repo.update(pos, obj, feas)
        if observer is not None:
            observer({"generation": t, "positions": pos, "velocity": vel, "repository": repo.obj, "repository_feasible": repo.feas})

    return _record("mopso", instance, params, repo.to_archive(), evaluate.calls, start)


# -- MOSSO ------------------------------------------------------------------


def mosso_update(
    current: np.ndarray,
    pbest: np.ndarray,
    leaders: np.ndarray,
    thresholds: tuple[float, float, float],
    n_cpus: int,
    rng: np.random.Generator,
) -> np.ndarray:
    c_g, c_p, c_w = thresholds
    rho = rng.random(current.shape)
    fresh = rng.integers(0, n_cpus, size=current.shape)
    return np.where(
        rho < c_g, leaders, np.where(rho < c_p, pbest, np.where(rho < c_w, current, fresh))
    )


def run_mosso(instance: ProblemInstance, params: MossoParams, observer: Observer | None = None) -> RunRecord:
    rng = np.random.default_rng(params.seed)
    mode = params.constraint_mode
    n_sol = params.n_sol
    evaluate = CountingEvaluator(instance, budget=n_sol * params.n_gen)
    start = time.perf_counter()

    pop = random_population(instance, n_sol, rng)
    obj, feas = evaluate(pop)
    pbest, pbest_obj, pbest_feas = pop.copy(), obj.copy(), feas.copy()
    repo = _Repository(pop, obj, feas, params.n_non, mode)

    for t in range(2, params.n_gen + 1):
        leaders = repo.draw(n_sol, rng)
        pop = mosso_update(pop, pbest, leaders, params.thresholds(t), instance.n_cpus, rng)
        obj, feas = evaluate(pop)
        better = dominates_rows(obj, feas, pbest_obj, pbest_feas, mode)
        pbest[better], pbest_obj[better], pbest_feas[better] = pop[better], obj[better], feas[better]
        repo.update(pop, obj, feas)
        if observer is not None:
            observer({"generation": t, "repository": repo.obj, "repository_feasible": repo.feas})

    return _record("mosso", instance, params, repo.to_archive(), evaluate.calls, start)
