import numpy as np
import pytest

from oracles import brute_crowding, brute_dominates, brute_dominates_ff
from pareto_sched.bsso import (
    BssoParams,
    hybrid_elite_select,
    run_bsso,
    select_exemplar,
    update_population,
    update_solution,
)
from pareto_sched.model import ObjectivePoint, evaluate
from pareto_sched.pareto import Archive, ArchiveEntry, ConstraintMode


class RiggedRng:
    """Stands in for a Generator: fixed uniforms, recorded fresh-processor draws."""

    def __init__(self, rho, fresh):
        self.rho = np.asarray(rho, dtype=float)
        self.fresh = np.asarray(fresh)

    def random(self, shape):
        return self.rho.reshape(shape)

    def integers(self, low, high, size):
        assert (low, high) == (0, 5)
        return self.fresh.reshape(size)


def to0(xs):
    return np.array(xs) - 1


def test_update_reproduces_worked_example():
    current, exemplar = to0([1, 2, 3, 2, 4]), to0([2, 1, 4, 3, 3])
    params = BssoParams(c_p=0.50, c_w=0.45, n_sol=1, n_gen=1)
    assert params.threshold_copy == 0.50 and params.threshold_keep == pytest.approx(0.95)
    rng = RiggedRng([0.32, 0.75, 0.47, 0.99, 0.23], fresh=to0([5, 5, 5, 4, 5]))
    new = update_solution(current, exemplar, params, rng, n_cpus=5)
    assert (new + 1).tolist() == [2, 2, 4, 4, 3]
    # only coordinate 4 comes from the fresh-random branch
    rng = RiggedRng([0.32, 0.75, 0.47, 0.99, 0.23], fresh=to0([1, 1, 1, 1, 1]))
    assert (update_solution(current, exemplar, params, rng, n_cpus=5) + 1).tolist() == [2, 2, 4, 1, 3]


def test_degenerate_thresholds(rng):
    cur = rng.integers(0, 7, size=40)
    ex = rng.integers(0, 7, size=40)
    assert np.array_equal(update_solution(cur, ex, BssoParams(c_p=1.0, c_w=0.0), rng, 7), ex)
    assert np.array_equal(update_solution(cur, ex, BssoParams(c_p=0.0, c_w=1.0), rng, 7), cur)


def test_branch_frequencies(rng):
    n = 100_000
    # distinguish branches with sentinel values outside the fresh range
    cur = np.full((1, n), -1)
    ex = np.full((1, n), -2)
    out = update_population(cur, ex, 0.3, 0.7, 5, rng)[0]
    for value, p in ((-2, 0.3), (-1, 0.4)):
        count = np.count_nonzero(out == value)
        assert abs(count - n * p) <= 3 * np.sqrt(n * p * (1 - p))
    assert abs(np.count_nonzero(out >= 0) - n * 0.3) <= 3 * np.sqrt(n * 0.21)


@pytest.mark.parametrize("c_p,c_w", [(-0.1, 0.5), (0.6, 0.6), (0.5, 1.1)])
def test_params_validation(c_p, c_w):
    with pytest.raises(ValueError):
        BssoParams(c_p=c_p, c_w=c_w)


def test_select_exemplar(rng):
    one = Archive(np.array([[3, 1]]), np.array([[1.0, 2.0]]), np.array([True]), 5)
    for _ in range(10):
        assert select_exemplar(one, rng).tolist() == [3, 1]
    k = 4
    arc = Archive(np.arange(k)[:, None], np.column_stack([np.arange(k), -np.arange(k)]).astype(float), np.ones(k, bool), k)
    n = 100_000
    counts = np.bincount([select_exemplar(arc, rng)[0] for _ in range(n)], minlength=k)
    p = 1 / k
    assert np.all(np.abs(counts - n * p) <= 3 * np.sqrt(n * p * (1 - p)))
    with pytest.raises(RuntimeError):
        select_exemplar(Archive(np.zeros((0, 2), int), np.zeros((0, 2)), np.zeros(0, bool), 3), rng)


def _entry(k, e, m):
    return ArchiveEntry(np.array([k]), ObjectivePoint(float(e), float(m), True))


def test_hybrid_select_front_equal_to_n_sol(rng):
    front = [_entry(i, i, 10 - i) for i in range(4)]
    pool = front + [_entry(10 + i, 20, 20 + i) for i in range(4)]
    assert hybrid_elite_select(front, pool, 4, rng) == front


def test_hybrid_select_oversized_front_drops_most_crowded(rng):
    xs = np.sort(rng.random(9))
    front = [_entry(i, x, 1 - x) for i, x in enumerate(xs)]
    pool = front + [_entry(100 + i, 5, 5 + i) for i in range(9)]
    chosen = hybrid_elite_select(front, pool, 4, rng)
    assert len(chosen) == 4 and all(c in front for c in chosen)
    cd = brute_crowding([(x, 1 - x) for x in xs])
    dropped = [cd[i] for i in range(9) if front[i] not in chosen]
    assert max(dropped) <= min(cd[front.index(c)] for c in chosen)


def test_hybrid_select_pads_randomly(rng):
    front = [_entry(0, 0, 1), _entry(1, 1, 0)]
    others = [_entry(10 + i, 5, 5 + i) for i in range(6)]
    pool = others[:3] + front + others[3:]
    chosen = hybrid_elite_select(front, pool, 4, rng)
    assert len(chosen) == 4
    assert chosen[:2] == front
    assert all(c in others for c in chosen[2:]) and chosen[2] is not chosen[3]


def test_hybrid_select_rejects_small_pool(rng):
    front = [_entry(0, 0, 1)]
    with pytest.raises(ValueError):
        hybrid_elite_select(front, front, 2, rng)


def test_run_budget_and_archive(small_instance):
    for n_sol, n_gen in [(1, 1), (3, 7), (20, 15), (50, 10)]:
        rec = run_bsso(small_instance, BssoParams(0.5, 0.3, n_sol, n_gen, seed=n_sol))
        assert rec.evaluations == n_sol * n_gen
        assert 1 <= len(rec.archive) <= n_sol
        assert rec.archive.is_mutually_nondominated(ConstraintMode.FEASIBILITY_FIRST)
        for sched, obj in zip(rec.archive.schedules, rec.archive.objectives):
            p = evaluate(small_instance, sched)
            assert (p.energy, p.makespan) == tuple(obj)


def test_mutation_free_run_is_a_no_op(small_instance):
    rec = run_bsso(small_instance, BssoParams(c_p=0.0, c_w=1.0, n_sol=1, n_gen=2, seed=3))
    initial = np.random.default_rng(3).integers(0, small_instance.n_cpus, size=(1, small_instance.n_tasks))
    assert len(rec.archive) == 1
    assert np.array_equal(rec.archive.schedules[0], initial[0])


def test_run_is_deterministic(small_instance):
    p = BssoParams(0.5, 0.5, 20, 30, seed=11, constraint_mode="ignore")
    assert run_bsso(small_instance, p).same_result(run_bsso(small_instance, p))
    other = run_bsso(small_instance, BssoParams(0.5, 0.5, 20, 30, seed=12, constraint_mode="ignore"))
    assert not run_bsso(small_instance, p).same_result(other)


@pytest.mark.parametrize("mode", ["ignore", "feasibility_first"])
def test_generation_invariants(medium_instance, mode):
    seen = []

    def observe(state):
        seen.append(state["generation"])
        challengers = list(
            zip(
                map(tuple, np.concatenate([state["previous_front"], state["offspring"]])),
                np.concatenate([state["previous_feasible"], state["offspring_feasible"]]),
            )
        )
        for f, ff in zip(map(tuple, state["front"]), state["front_feasible"]):
            if mode == "ignore":
                assert not any(brute_dominates(c, f) for c, _ in challengers)
            else:
                assert not any(brute_dominates_ff(c, fc, f, ff) for c, fc in challengers)
        assert len(state["parents"]) == 16
        # with c_r = 0 every child coordinate comes from its parent or exemplar
        children, parents, ex = state["children"], state["parents"], state["exemplars"]
        assert np.all((children == parents) | (children == ex))

    run_bsso(medium_instance, BssoParams(0.5, 0.5, 16, 25, seed=5, constraint_mode=mode), observer=observe)
    assert seen == list(range(2, 26))


def test_feasibility_first_archive_without_feasible_points():
    from pareto_sched.model import ProblemInstance

    inst = ProblemInstance([5000.0] * 30, [1000.0, 2000.0], [0.3, 1.2], deadline=1.0)
    rec = run_bsso(inst, BssoParams(0.5, 0.3, 10, 20, seed=1))
    assert len(rec.archive) >= 1
    assert not rec.archive.feasible.any()
    # only the violation-minimal makespan survives
    assert np.ptp(rec.archive.objectives[:, 1]) == 0
