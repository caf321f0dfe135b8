"""Dominance, nondominated filtering, archive merging and crowding-based truncation.

Array kernels work on an ``(N, 2)`` objective matrix (energy, makespan) plus a
boolean feasibility vector; the list-based wrappers take ``ArchiveEntry``
objects. Both objectives are minimised.
"""

from __future__ import annotations

import csv
import enum
import io
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .model import ObjectivePoint


class ConstraintMode(str, enum.Enum):
    IGNORE = "ignore"
    FEASIBILITY_FIRST = "feasibility_first"


class FrontContractWarning(RuntimeWarning):
    """A merge input that should have been mutually nondominated was not."""


@dataclass(frozen=True, eq=False)
class ArchiveEntry:
    schedule: np.ndarray  # 0-based processor indices
    point: ObjectivePoint


def dominates(a: ObjectivePoint, b: ObjectivePoint, mode: ConstraintMode = ConstraintMode.IGNORE) -> bool:
    if ConstraintMode(mode) is ConstraintMode.FEASIBILITY_FIRST:
        if a.feasible != b.feasible:
            return a.feasible
        if not a.feasible:
            return a.makespan < b.makespan
    return (
        a.energy <= b.energy
        and a.makespan <= b.makespan
        and (a.energy < b.energy or a.makespan < b.makespan)
    )


def dominance_matrix(obj: np.ndarray, feas: np.ndarray, mode: ConstraintMode) -> np.ndarray:
    """``D[i, j]`` is True when point i dominates point j."""
    e, m = obj[:, 0], obj[:, 1]
    le = (e[:, None] <= e[None, :]) & (m[:, None] <= m[None, :])
    lt = (e[:, None] < e[None, :]) | (m[:, None] < m[None, :])
    dom = le & lt
    if ConstraintMode(mode) is ConstraintMode.FEASIBILITY_FIRST:
        fi, fj = feas[:, None], feas[None, :]
        both_infeasible = ~fi & ~fj
        dom = np.where(fi & ~fj, True, np.where(both_infeasible, m[:, None] < m[None, :], dom & fi & fj))
    return dom


def dominates_rows(
    a_obj: np.ndarray, a_feas: np.ndarray, b_obj: np.ndarray, b_feas: np.ndarray, mode: ConstraintMode
) -> np.ndarray:
    """Row-wise ``a[k] dominates b[k]``."""
    ae, am = a_obj[:, 0], a_obj[:, 1]
    be, bm = b_obj[:, 0], b_obj[:, 1]
    dom = (ae <= be) & (am <= bm) & ((ae < be) | (am < bm))
    if ConstraintMode(mode) is ConstraintMode.FEASIBILITY_FIRST:
        dom = np.where(a_feas & ~b_feas, True, np.where(~a_feas & ~b_feas, am < bm, dom & a_feas & b_feas))
    return dom


def _first_unique(obj: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Drop objective-duplicates among ``obj[idx]``, keeping the earliest index."""
    if idx.size <= 1:
        return idx
    _, first = np.unique(obj[idx], axis=0, return_index=True)
    return idx[np.sort(first)]


def nondominated_indices(obj: np.ndarray, feas: np.ndarray, mode: ConstraintMode) -> np.ndarray:
    """Pairwise O(N^2) filter; returns indices in input order, duplicates collapsed."""
    obj = np.asarray(obj, dtype=float)
    if len(obj) == 0:
        return np.zeros(0, dtype=np.int64)
    dom = dominance_matrix(obj, np.asarray(feas, dtype=bool), mode)
    keep = np.flatnonzero(~dom.any(axis=0))
    return _first_unique(obj, keep)


def sweep_indices(obj: np.ndarray, feas: np.ndarray, mode: ConstraintMode) -> np.ndarray:
    """Nondominated set of a two-objective point set by a sort-and-sweep.

    Returns indices sorted by ascending energy. Ties on identical points keep
    the lowest index, matching :func:`nondominated_indices`.
    """
    obj = np.asarray(obj, dtype=float)
    feas = np.asarray(feas, dtype=bool)
    n = len(obj)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    candidates = np.arange(n)
    if ConstraintMode(mode) is ConstraintMode.FEASIBILITY_FIRST:
        if feas.any():
            candidates = candidates[feas]
        else:
            # among infeasible points only the smallest makespan survives
            m = obj[:, 1]
            tied = candidates[m == m.min()]
            tied = tied[np.lexsort((tied, obj[tied, 0]))]
            return tied[np.r_[True, np.diff(obj[tied, 0]) != 0]]
    sub = obj[candidates]
    order = np.lexsort((candidates, sub[:, 1], sub[:, 0]))
    m_sorted = sub[order, 1]
    prev_best = np.minimum.accumulate(np.r_[np.inf, m_sorted[:-1]])
    return candidates[order[m_sorted < prev_best]]


def group_compare_indices(
    prev_obj: np.ndarray,
    prev_feas: np.ndarray,
    new_obj: np.ndarray,
    new_feas: np.ndarray,
    mode: ConstraintMode,
) -> np.ndarray:
    """Indices into ``concat(prev, new)`` of the nondominated set of the union.

    The offspring are first filtered pairwise; the surviving offspring front is
    then merged with the (already nondominated) previous front by a sorted sweep.
    """
    prev_obj = np.asarray(prev_obj, dtype=float).reshape(-1, 2)
    new_obj = np.asarray(new_obj, dtype=float).reshape(-1, 2)
    prev_feas = np.asarray(prev_feas, dtype=bool)
    new_feas = np.asarray(new_feas, dtype=bool)
    n_prev = len(prev_obj)
    all_obj = np.concatenate([prev_obj, new_obj])
    all_feas = np.concatenate([prev_feas, new_feas])

    if n_prev and len(sweep_indices(prev_obj, prev_feas, mode)) != n_prev:
        warnings.warn(
            "previous front is not mutually nondominated; falling back to pairwise filter",
            FrontContractWarning,
            stacklevel=2,
        )
        return nondominated_indices(all_obj, all_feas, mode)

    new_front = n_prev + nondominated_indices(new_obj, new_feas, mode)
    merged = np.concatenate([np.arange(n_prev), new_front])
    return merged[sweep_indices(all_obj[merged], all_feas[merged], mode)]


def crowding_values(obj: np.ndarray) -> np.ndarray:
    """Per-point crowding: root-sum-square of normalised nearest gaps per objective."""
    obj = np.asarray(obj, dtype=float)
    n = len(obj)
    if n == 0:
        raise ValueError("crowding distance of an empty front")
    if n == 1:
        return np.array([np.inf])
    sq = np.zeros(n)
    for col in range(obj.shape[1]):
        v = obj[:, col]
        span = v.max() - v.min()
        if span == 0:
            continue
        order = np.argsort(v, kind="stable")
        s = v[order]
        gaps = np.diff(s)
        nearest = np.minimum(np.r_[np.inf, gaps], np.r_[gaps, np.inf])
        d = np.empty(n)
        d[order] = nearest / span
        sq += d * d
    return np.sqrt(sq)


def truncation_order(obj: np.ndarray) -> np.ndarray:
    """Indices ranked by descending crowding, then energy, makespan, input order."""
    obj = np.asarray(obj, dtype=float)
    cd = crowding_values(obj)
    return np.lexsort((np.arange(len(obj)), obj[:, 1], obj[:, 0], -cd))


def truncate_indices(obj: np.ndarray, keep: int) -> np.ndarray:
    if keep < 1:
        raise ValueError("keep must be >= 1")
    n = len(obj)
    if n <= keep:
        return np.arange(n)
    return truncation_order(obj)[:keep]


# -- entry-level wrappers ---------------------------------------------------


def _arrays(entries: Sequence[ArchiveEntry]) -> tuple[np.ndarray, np.ndarray]:
    obj = np.array([[e.point.energy, e.point.makespan] for e in entries], dtype=float).reshape(-1, 2)
    feas = np.array([e.point.feasible for e in entries], dtype=bool)
    return obj, feas


def nondominated_filter(entries: Sequence[ArchiveEntry], mode: ConstraintMode = ConstraintMode.IGNORE) -> list[ArchiveEntry]:
    entries = list(entries)
    obj, feas = _arrays(entries)
    return [entries[i] for i in nondominated_indices(obj, feas, mode)]


def group_compare(
    previous_front: "Archive | Sequence[ArchiveEntry]",
    new_offspring: Sequence[ArchiveEntry],
    mode: ConstraintMode = ConstraintMode.IGNORE,
) -> list[ArchiveEntry]:
    prev = previous_front.entries if isinstance(previous_front, Archive) else list(previous_front)
    new = list(new_offspring)
    p_obj, p_feas = _arrays(prev)
    n_obj, n_feas = _arrays(new)
    union = prev + new
    return [union[i] for i in group_compare_indices(p_obj, p_feas, n_obj, n_feas, mode)]


def crowding_distance(front: Sequence[ArchiveEntry]) -> list[float]:
    obj, _ = _arrays(list(front))
    return crowding_values(obj).tolist()


def truncate_by_crowding(front: Sequence[ArchiveEntry], keep: int) -> list[ArchiveEntry]:
    front = list(front)
    obj, _ = _arrays(front)
    return [front[i] for i in truncate_indices(obj, keep)]


# -- archive ----------------------------------------------------------------


class Archive:
    """Bounded, mutually nondominated set of schedules with their objectives."""

    def __init__(
        self,
        schedules: np.ndarray,
        objectives: np.ndarray,
        feasible: np.ndarray,
        capacity: int,
    ):
        self.schedules = np.asarray(schedules, dtype=np.int64)
        self.objectives = np.asarray(objectives, dtype=float).reshape(-1, 2)
        self.feasible = np.asarray(feasible, dtype=bool)
        self.capacity = int(capacity)
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")
        if len(self.objectives) > self.capacity:
            raise ValueError("archive holds more entries than its capacity")
        if not (len(self.schedules) == len(self.objectives) == len(self.feasible)):
            raise ValueError("archive arrays differ in length")

    @classmethod
    def from_population(
        cls,
        schedules: np.ndarray,
        objectives: np.ndarray,
        feasible: np.ndarray,
        capacity: int,
        mode: ConstraintMode,
    ) -> "Archive":
        """Nondominated subset of a population, truncated by crowding to ``capacity``."""
        idx = nondominated_indices(objectives, feasible, mode)
        idx = idx[truncate_indices(objectives[idx], capacity)]
        idx = idx[np.lexsort((objectives[idx, 1], objectives[idx, 0]))]
        return cls(schedules[idx], objectives[idx], feasible[idx], capacity)

    @classmethod
    def from_entries(cls, entries: Iterable[ArchiveEntry], capacity: int) -> "Archive":
        entries = list(entries)
        obj, feas = _arrays(entries)
        n_tasks = len(entries[0].schedule) if entries else 0
        sched = np.array([e.schedule for e in entries], dtype=np.int64).reshape(-1, n_tasks)
        return cls(sched, obj, feas, capacity)

    def __len__(self) -> int:
        return len(self.objectives)

    @property
    def entries(self) -> list[ArchiveEntry]:
        return [
            ArchiveEntry(s, ObjectivePoint(float(o[0]), float(o[1]), bool(f)))
            for s, o, f in zip(self.schedules, self.objectives, self.feasible)
        ]

    def points(self) -> list[ObjectivePoint]:
        return [e.point for e in self.entries]

    def is_mutually_nondominated(self, mode: ConstraintMode = ConstraintMode.IGNORE) -> bool:
        return len(nondominated_indices(self.objectives, self.feasible, mode)) == len(self)

    def to_rows(self) -> list[list]:
        return [
            [float(o[0]), float(o[1]), bool(f), ";".join(str(int(v) + 1) for v in s)]
            for s, o, f in zip(self.schedules, self.objectives, self.feasible)
        ]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], capacity: int) -> "Archive":
        obj = np.array([[float(r[0]), float(r[1])] for r in rows], dtype=float).reshape(-1, 2)
        feas = np.array([_parse_bool(r[2]) for r in rows], dtype=bool)
        sched_lists = [[int(v) - 1 for v in str(r[3]).split(";") if v != ""] for r in rows]
        n_tasks = len(sched_lists[0]) if sched_lists else 0
        sched = np.array(sched_lists, dtype=np.int64).reshape(-1, n_tasks)
        return cls(sched, obj, feas, capacity)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["energy", "makespan", "feasible", "assignment"])
        for row in self.to_rows():
            writer.writerow([repr(row[0]), repr(row[1]), "true" if row[2] else "false", row[3]])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, capacity: int | None = None) -> "Archive":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header != ["energy", "makespan", "feasible", "assignment"]:
            raise ValueError(f"unexpected archive CSV header: {header}")
        rows = [r for r in reader if r]
        return cls.from_rows(rows, capacity if capacity is not None else max(len(rows), 1))


def _parse_bool(value) -> bool:
    if isinstance(value, str):
        v = value.strip().lower()
        if v in ("true", "1"):
            return True
        if v in ("false", "0"):
            return False
        raise ValueError(f"not a boolean: {value!r}")
    return bool(value)
