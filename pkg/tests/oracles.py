"""Slow, loop-based reference implementations. Deliberately share no code with the package."""

from __future__ import annotations

import math


def brute_evaluate(sizes, speeds, energies, assignment_1based):
    energy = 0.0
    loads = [0.0] * len(speeds)
    for i, cpu in enumerate(assignment_1based):
        t = sizes[i] / speeds[cpu - 1]
        energy += t * energies[cpu - 1]
        loads[cpu - 1] += t
    return energy, max(loads)


def brute_dominates(a, b):
    return a[0] <= b[0] and a[1] <= b[1] and (a[0] < b[0] or a[1] < b[1])


def brute_dominates_ff(a, fa, b, fb):
    if fa and not fb:
        return True
    if fb and not fa:
        return False
    if not fa and not fb:
        return a[1] < b[1]
    return brute_dominates(a, b)


def brute_front(points, feasible=None):
    """Set of nondominated objective tuples (duplicates collapse naturally)."""
    n = len(points)
    out = set()
    for i in range(n):
        dominated = False
        for j in range(n):
            if feasible is None:
                d = brute_dominates(points[j], points[i])
            else:
                d = brute_dominates_ff(points[j], feasible[j], points[i], feasible[i])
            if d:
                dominated = True
                break
        if not dominated:
            out.add(tuple(points[i]))
    return out


def brute_crowding(points):
    n = len(points)
    if n == 1:
        return [math.inf]
    values = []
    for i in range(n):
        sq = 0.0
        for l in range(2):
            col = [p[l] for p in points]
            span = max(col) - min(col)
            if span == 0:
                continue
            nearest = min(abs(points[i][l] - points[j][l]) for j in range(n) if j != i)
            sq += (nearest / span) ** 2
        values.append(math.sqrt(sq))
    return values


def brute_nearest_distance(p, front):
    return min(math.hypot(p[0] - q[0], p[1] - q[1]) for q in front)
