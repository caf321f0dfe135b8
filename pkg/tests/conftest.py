import numpy as np
import pytest

from pareto_sched import BenchmarkSpec, ProblemInstance, generate


@pytest.fixture
def two_task_instance():
    return ProblemInstance(
        task_sizes=[5000, 6000],
        cpu_speeds=[1000, 2000],
        cpu_energies=[0.3, 1.2],
        deadline=30,
        name="two-task",
    )


@pytest.fixture(scope="session")
def small_instance():
    return generate(BenchmarkSpec(20, 5, 30.0, seed=7))


@pytest.fixture(scope="session")
def medium_instance():
    return generate(BenchmarkSpec(50, 10, 30.0, seed=8))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
