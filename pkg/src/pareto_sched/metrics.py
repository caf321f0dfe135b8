"""Convergence (GD) and spacing (SP) indicators against a simulated reference front."""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .model import ObjectivePoint
from .pareto import Archive, ConstraintMode, sweep_indices


class DegenerateMetricWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class ReferenceFront:
    """Mutually nondominated points, strictly ascending in energy."""

    points: np.ndarray  # (k, 2) energy, makespan

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if len(pts) == 0:
            raise ValueError("reference front must be nonempty")
        if len(pts) > 1 and not (np.all(np.diff(pts[:, 0]) > 0) and np.all(np.diff(pts[:, 1]) < 0)):
            raise ValueError("reference front must be nondominated and sorted by energy")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def scale(self) -> float:
        """Largest objective range across the front."""
        return float(np.ptp(self.points, axis=0).max())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ReferenceFront) and np.array_equal(self.points, other.points)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["energy", "makespan"])
        for e, m in self.points:
            writer.writerow([repr(float(e)), repr(float(m))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ReferenceFront":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header != ["energy", "makespan"]:
            raise ValueError(f"unexpected front CSV header: {header}")
        return cls(np.array([[float(r[0]), float(r[1])] for r in reader if r], dtype=float))


def _as_matrix(points: Sequence[ObjectivePoint] | np.ndarray | Archive) -> np.ndarray:
    if isinstance(points, Archive):
        return points.objectives
    if isinstance(points, np.ndarray):
        return points.astype(float).reshape(-1, 2)
    return np.array([[p.energy, p.makespan] for p in points], dtype=float).reshape(-1, 2)


def front_from_points(points: np.ndarray) -> ReferenceFront:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    idx = sweep_indices(pts, np.ones(len(pts), dtype=bool), ConstraintMode.IGNORE)
    return ReferenceFront(pts[idx])


def build_simulated_front(archives: Iterable[Archive | Sequence[ObjectivePoint] | np.ndarray]) -> ReferenceFront:
    """Nondominated set of every archive point pooled together (constraints ignored)."""
    pooled = [_as_matrix(a) for a in archives]
    pooled = [p for p in pooled if len(p)]
    if not pooled:
        raise ValueError("cannot build a front from empty archives")
    return front_from_points(np.concatenate(pooled))


def distances_to_front(points, front: ReferenceFront) -> np.ndarray:
    pts = _as_matrix(points)
    diff = pts[:, None, :] - front.points[None, :, :]
    return np.sqrt((diff**2).sum(axis=2)).min(axis=1)


def gd(points, front: ReferenceFront) -> float:
    d = distances_to_front(points, front)
    if d.size == 0:
        raise ValueError("GD of an empty archive")
    return float(np.sqrt(np.sum(d**2)) / d.size)


def sp(points, front: ReferenceFront) -> float:
    """Spread of the distances-to-front around their mean; 0 (with a warning) below two points."""
    d = distances_to_front(points, front)
    if d.size < 2:
        warnings.warn("SP needs at least two points; returning 0", DegenerateMetricWarning, stacklevel=2)
        return 0.0
    return float(np.sqrt(np.sum((d.mean() - d) ** 2)) / (d.size - 1))


def count_stats(archive, front: ReferenceFront, tol: float = 1e-9) -> tuple[int, int]:
    """(N_n, N_p): archive size and how many archive points sit on the front.

    ``tol`` is relative to the front's largest objective range.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    pts = _as_matrix(archive)
    if len(pts) == 0:
        return 0, 0
    scale = front.scale or max(1.0, float(np.abs(front.points).max()))
    d = distances_to_front(pts, front)
    return len(pts), int(np.count_nonzero(d <= tol * scale))
