"""
Task partitioning: blocking-aware worst-fit (BR-WFD), the utilization
worst-fit baseline (WFD), a brute-force allocator for small instances, and
the minimum core count search built on any of them.
"""
import functools
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from .exceptions import ConfigError, NotSchedulableWithinCap
from .model import Allocation
from .rta import is_schedulable
from .utils import tolerant_ceil

logger = logging.getLogger(__name__)

DEFAULT_BETA = 0.1

RTA_FAIL = 'rta_fail'
CORE_OVERFLOW = 'core_overflow'

# Placement branches recorded in the allocation trace.
SIMILARITY = 'similarity'
FALLBACK = 'fallback'
ZERO_SIMILARITY = 'zero_similarity'

# Largest task count allocate_exhaustive accepts.
EXHAUSTIVE_LIMIT = 10


@dataclass(frozen=True)
class PbuTable:
    pgb_low: Tuple[float, ...]
    pgb_high: Tuple[float, ...]
    pbu: Tuple[float, ...]
    beta: float


@dataclass(frozen=True)
class Failure:
    reason: str
    task: Optional[int] = None

    def __str__(self):
        return self.reason if self.task is None else '%s(%d)' % (self.reason, self.task)


@dataclass(frozen=True)
class TraceEntry:
    """
    One placement decision.

    :task         Task id
    :candidate    Core of maximal resource similarity, None when every similarity is 0
    :chosen       Core the task was committed to
    :branch       SIMILARITY, FALLBACK or ZERO_SIMILARITY
    """
    task: int
    candidate: Optional[int]
    chosen: int
    branch: str

    @property
    def fallback(self):
        return self.branch != SIMILARITY

    def as_dict(self):
        return {
            'task': self.task,
            'candidate': self.candidate,
            'chosen': self.chosen,
            'fallback': self.fallback,
            'branch': self.branch,
        }


@dataclass(frozen=True)
class PartitionOutcome:
    allocation: Allocation
    trace: Tuple[TraceEntry, ...]
    result: object = None
    failure: Optional[Failure] = None

    @property
    def success(self):
        return self.failure is None

    def as_dict(self):
        alloc = self.allocation
        return {
            'verdict': 'schedulable' if self.success else str(self.failure),
            'cores': [{
                'core': core,
                'tasks': sorted(alloc.core_tasks[core]),
                'utilization': alloc.utilization[core],
                'blocking_load': alloc.blocking_load[core],
            } for core in range(alloc.core_count)],
            'trace': [entry.as_dict() for entry in self.trace],
        }


def pgb_low(ts, i):
    """
    Estimated blocking from lower priority tasks, treating every resource as
    global and every lower priority task as remote.
    """
    task = ts[i]
    total = 0.0
    for k in task.resources:
        total += max((ts[j].max_section(k) for j in ts.accessors(k) if ts[j].priority < task.priority),
                     default=0.0)
    return total


def pgb_high(ts, i):
    """Estimated blocking from higher priority tasks sharing any of task i's resources."""
    task = ts[i]
    total = 0.0
    for k in task.resources:
        for j in ts.accessors(k):
            if ts[j].priority > task.priority:
                total += math.ceil(task.period / ts[j].period) * ts[j].total_section(k)
    return total


def pbu_table(ts, beta=DEFAULT_BETA):
    """
    PBU_i = (C_i + beta * (PGB_i^L + PGB_i^H)) / T_i for every task.

    :beta    Weight of the blocking estimate, >= 0
    """
    if beta < 0:
        raise ConfigError('beta must be non-negative, got %r' % beta)
    low = tuple(pgb_low(ts, task.id) for task in ts)
    high = tuple(pgb_high(ts, task.id) for task in ts)
    pbu = tuple((task.wcet + beta * (low[task.id] + high[task.id])) / task.period for task in ts)
    return PbuTable(low, high, pbu, beta)


def resource_correlation(ts, i, j):
    """|Theta_i intersect Theta_j|"""
    return len(set(ts[i].resources) & set(ts[j].resources))


def resource_similarity(ts, alloc, i, core):
    """Sum of resource correlations between task i and the tasks already on `core`."""
    return sum(resource_correlation(ts, i, j) for j in alloc.core_tasks[core])


def _check_cores(ts, m):
    if m < 0:
        raise ConfigError('core count must be non-negative, got %d' % m)
    if m == 0 and ts.n > 0:
        return Failure(CORE_OVERFLOW)
    return None


def _commit(ts, alloc, task, core, load):
    """Place a task and run the incremental schedulability check."""
    alloc = alloc.extend(task, core, load)
    result = is_schedulable(ts, alloc, stop_at_first=True)
    failure = None if result.schedulable else Failure(RTA_FAIL, result.failed_task)
    return alloc, result, failure


def allocate_brwfd(ts, m, beta=DEFAULT_BETA):
    """
    Blocking-aware worst-fit decreasing allocation.

    Tasks are taken in descending PBU order.  Each goes to the core of
    highest resource similarity unless that would push the core's blocking
    load above the running maximum, or no core shares a resource with it,
    in which case it goes to the core of least blocking load.  The partial
    allocation is checked after every placement and the first failure ends
    the run.

    :ts      TaskSet
    :m       Core count
    :beta    PBU weight
    :return  PartitionOutcome
    """
    failure = _check_cores(ts, m)
    alloc, trace = Allocation.empty(m), []
    if failure:
        return PartitionOutcome(alloc, (), None, failure)

    table = pbu_table(ts, beta)
    order = sorted(ts, key=lambda task: (-table.pbu[task.id], task.id))
    bu_max, result = 0.0, is_schedulable(ts, alloc)

    def least_loaded():
        return min(range(m), key=lambda core: (alloc.blocking_load[core], core))

    for task in order:
        pbu = table.pbu[task.id]
        similarity = [resource_similarity(ts, alloc, task.id, core) for core in range(m)]
        if max(similarity) > 0:
            candidate = min(range(m), key=lambda core: (-similarity[core], alloc.blocking_load[core], core))
            if alloc.blocking_load[candidate] + pbu > bu_max:
                chosen, branch = least_loaded(), FALLBACK
            else:
                chosen, branch = candidate, SIMILARITY
        else:
            candidate = None
            chosen, branch = least_loaded(), ZERO_SIMILARITY

        trace.append(TraceEntry(task.id, candidate, chosen, branch))
        alloc, result, failure = _commit(ts, alloc, task, chosen, pbu)
        bu_max = max(bu_max, alloc.blocking_load[chosen])
        logger.debug('brwfd: task %d -> core %d (%s, candidate %s, BUmax %r)',
                     task.id, chosen, branch, candidate, bu_max)
        if failure:
            logger.debug('brwfd: %s with %d cores', failure, m)
            return PartitionOutcome(alloc, tuple(trace), result, failure)

    return PartitionOutcome(alloc, tuple(trace), result)


def allocate_wfd(ts, m):
    """
    Worst-fit decreasing by utilization with the same incremental
    schedulability check as allocate_brwfd.
    """
    failure = _check_cores(ts, m)
    alloc, trace = Allocation.empty(m), []
    if failure:
        return PartitionOutcome(alloc, (), None, failure)

    result = is_schedulable(ts, alloc)
    for task in sorted(ts, key=lambda task: (-task.utilization, task.id)):
        chosen = min(range(m), key=lambda core: (alloc.utilization[core], core))
        trace.append(TraceEntry(task.id, None, chosen, FALLBACK))
        alloc, result, failure = _commit(ts, alloc, task, chosen, None)
        if failure:
            logger.debug('wfd: %s with %d cores', failure, m)
            return PartitionOutcome(alloc, tuple(trace), result, failure)

    return PartitionOutcome(alloc, tuple(trace), result)


def allocate_exhaustive(ts, m):
    """
    First schedulable assignment in lexicographic order over all m^n
    assignments (task 0 most significant).  Only for small task sets.
    """
    if ts.n > EXHAUSTIVE_LIMIT:
        raise ConfigError('exhaustive allocation is limited to %d tasks, got %d' % (EXHAUSTIVE_LIMIT, ts.n))
    failure = _check_cores(ts, m)
    if failure:
        return PartitionOutcome(Allocation.empty(m), (), None, failure)

    alloc, result = Allocation.empty(m), is_schedulable(ts, Allocation.empty(m))
    for cores in itertools.product(range(m), repeat=ts.n):
        alloc = Allocation.from_assignment(ts, m, dict(enumerate(cores)))
        result = is_schedulable(ts, alloc, stop_at_first=True)
        if result.schedulable:
            trace = tuple(TraceEntry(i, None, core, FALLBACK) for i, core in enumerate(cores))
            return PartitionOutcome(alloc, trace, result)

    return PartitionOutcome(alloc, (), result, Failure(RTA_FAIL, result.failed_task))


ALGORITHMS = {
    'brwfd': allocate_brwfd,
    'wfd': allocate_wfd,
    'exhaustive': allocate_exhaustive,
}


def allocator(name, beta=DEFAULT_BETA):
    """Allocator callable `f(ts, m)` for an algorithm name."""
    if name not in ALGORITHMS:
        raise ConfigError('unknown algorithm %r, expected one of %s' % (name, ', '.join(sorted(ALGORITHMS))))
    if name == 'brwfd':
        return functools.partial(allocate_brwfd, beta=beta)
    return ALGORITHMS[name]


def start_cores(ts):
    """m0, the system load rounded up."""
    return tolerant_ceil(ts.utilization)


def search_cores(ts, algorithm='brwfd', cap=None, beta=DEFAULT_BETA):
    """
    Smallest core count, starting from the rounded-up system load, at which
    the allocator succeeds.

    :algorithm    Algorithm name or allocator callable f(ts, m)
    :cap          Largest core count tried, 8 * max(m0, 1) by default
    :return       (core count, PartitionOutcome)
    """
    allocate = allocator(algorithm, beta) if isinstance(algorithm, str) else algorithm
    m = start_cores(ts)
    cap = 8 * max(m, 1) if cap is None else cap
    if cap < m:
        raise ConfigError('cap %d is below the starting core count %d' % (cap, m))

    while m <= cap:
        outcome = allocate(ts, m)
        if outcome.success:
            return m, outcome
        m += 1
    raise NotSchedulableWithinCap(cap)


def min_cores(ts, algorithm='brwfd', cap=None, beta=DEFAULT_BETA):
    """Core count half of search_cores."""
    return search_cores(ts, algorithm, cap, beta)[0]
