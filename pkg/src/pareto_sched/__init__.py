"""Bi-objective (energy, makespan) cloud task scheduling with BSSO and baseline metaheuristics."""

from .baselines import MopsoParams, MossoParams, NsgaParams, run_mopso, run_mosso, run_nsga2
from .benchgen import BenchmarkSpec, generate
from .bsso import BssoParams, hybrid_elite_select, run_bsso, select_exemplar, update_solution
from .harness import ExperimentPlan, run_algorithm, run_plan, score_and_summarize
from .metrics import ReferenceFront, build_simulated_front, count_stats, gd, sp
from .model import ObjectivePoint, ProblemInstance, evaluate, processing_time, random_schedule
from .pareto import (
    Archive,
    ArchiveEntry,
    ConstraintMode,
    crowding_distance,
    dominates,
    group_compare,
    nondominated_filter,
    truncate_by_crowding,
)
from .record import RunRecord

__all__ = [
    "Archive",
    "ArchiveEntry",
    "BenchmarkSpec",
    "BssoParams",
    "ConstraintMode",
    "ExperimentPlan",
    "MopsoParams",
    "MossoParams",
    "NsgaParams",
    "ObjectivePoint",
    "ProblemInstance",
    "ReferenceFront",
    "RunRecord",
    "build_simulated_front",
    "count_stats",
    "crowding_distance",
    "dominates",
    "evaluate",
    "gd",
    "generate",
    "group_compare",
    "hybrid_elite_select",
    "nondominated_filter",
    "processing_time",
    "random_schedule",
    "run_algorithm",
    "run_bsso",
    "run_mopso",
    "run_mosso",
    "run_nsga2",
    "run_plan",
    "score_and_summarize",
    "select_exemplar",
    "sp",
    "truncate_by_crowding",
    "update_solution",
]
