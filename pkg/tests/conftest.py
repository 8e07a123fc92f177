import os

import pytest

from mpcpart.model import Allocation, CriticalSection, Task, TaskSet
from mpcpart.rng import Xoshiro256

SAMPLES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'samples')


def independent(*tasks):
    """
    Resource-free task set from (wcet, period) pairs with rate monotonic
    priorities, ties broken by id.
    """
    order = sorted(range(len(tasks)), key=lambda i: (tasks[i][1], i))
    priorities = dict((i, len(tasks) - rank) for rank, i in enumerate(order))
    return TaskSet(tuple(Task(i, float(c), float(t), priorities[i]) for i, (c, t) in enumerate(tasks)), 0)


def random_taskset(rng, n, resources, util=(0.05, 0.4)):
    """Small random task set with rate monotonic priorities and short sections."""
    wcets = [rng.uniform(1.0, 10.0) for _ in range(n)]
    periods = [c / rng.uniform(*util) for c in wcets]
    order = sorted(range(n), key=lambda i: (periods[i], i))
    priorities = dict((i, n - rank) for rank, i in enumerate(order))
    tasks = []
    for i in range(n):
        sections = tuple(CriticalSection(rng.randint(0, resources - 1), wcets[i] * rng.uniform(0.0, 0.2))
                         for _ in range(rng.randint(0, 2))) if resources else ()
        tasks.append(Task(i, wcets[i], periods[i], priorities[i], sections))
    return TaskSet(tuple(tasks), resources).validate()


@pytest.fixture
def f1():
    return TaskSet((
        Task(0, 1.0, 4.0, 3, (CriticalSection(0, 0.2),)),
        Task(1, 2.0, 10.0, 2),
        Task(2, 3.0, 20.0, 1, (CriticalSection(0, 0.5),)),
    ), 1).validate()


@pytest.fixture
def f1_alloc(f1):
    return Allocation.from_assignment(f1, 2, {0: 0, 1: 0, 2: 1})


@pytest.fixture
def f1_path():
    return os.path.join(SAMPLES, 'f1.json')


@pytest.fixture
def f1_alloc_path():
    return os.path.join(SAMPLES, 'f1_allocation.json')


@pytest.fixture
def rng():
    return Xoshiro256(2024)
