"""
Worst-case MPCP blocking bounds for a task under a (possibly partial)
allocation: transitive remote preemption, local resource blocking, direct
global blocking by lower and higher priority tasks, and multiple priority
inversion.
"""
import logging
import math
from dataclasses import dataclass

from .model import ceiling_priority, local_ceiling, resource_locality

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BlockingBreakdown:
    dlb: float
    dgb_low: float
    dgb_high: float
    mli: float
    total: float

    @classmethod
    def of(cls, dlb, dgb_low, dgb_high, mli):
        return cls(dlb, dgb_low, dgb_high, mli, dlb + dgb_low + dgb_high + mli)

    def as_dict(self):
        return {
            'dlb': self.dlb,
            'dgb_low': self.dgb_low,
            'dgb_high': self.dgb_high,
            'mli': self.mli,
            'total': self.total,
        }


ZERO = BlockingBreakdown.of(0.0, 0.0, 0.0, 0.0)


class BlockingAnalysis(object):
    """
    Blocking terms for every assigned task of one allocation.  Locality,
    ceilings and the transitive preemption terms are computed once and
    shared by all queries against the same allocation.

    :ts       TaskSet
    :alloc    Allocation, possibly partial
    """

    def __init__(self, ts, alloc):
        self.ts = ts
        self.alloc = alloc
        self.locality = resource_locality(ts, alloc)
        self._ceilings = {}
        self._alpha = {}
        self._breakdowns = {}

    def is_global(self, k):
        return self.locality[k].is_global

    def ceiling(self, k):
        if k not in self._ceilings:
            self._ceilings[k] = ceiling_priority(self.ts, k)
        return self._ceilings[k]

    def global_count(self, i):
        """N_{i,G}, critical sections of task i on global resources."""
        task = self.ts[i]
        return sum(task.access_count(k) for k in task.resources if self.is_global(k))

    def _require_assigned(self, i):
        """Core of task i; raises UnassignedTask for tasks outside the allocation."""
        return self.alloc.core_of(i)

    def _remote_accessors(self, i, k):
        core = self._require_assigned(i)
        assignment = self.alloc.assignment
        return [j for j in self.ts.accessors(k) if j in assignment and assignment[j] != core]

    def _lower_on_core(self, i):
        core = self.alloc.core_of(i)
        priority = self.ts[i].priority
        return [j for j in sorted(self.alloc.core_tasks[core]) if self.ts[j].priority < priority]

    def alpha(self, j, k):
        """
        Transitive remote preemption suffered by task j while holding r_k:
        every other task on j's core may run one global critical section with
        a ceiling above Omega_k.
        """
        key = (j, k)
        if key in self._alpha:
            return self._alpha[key]

        core = self.alloc.core_of(j)
        omega = self.ceiling(k)
        value = 0.0
        for u in sorted(self.alloc.core_tasks[core]):
            if u == j:
                continue
            task = self.ts[u]
            value += max((task.max_section(x) for x in task.resources
                          if self.is_global(x) and self.ceiling(x) > omega), default=0.0)
        self._alpha[key] = value
        return value

    def dlb(self, i):
        task = self.ts[i]
        core = self.alloc.core_of(i)
        longest = 0.0
        for j in self._lower_on_core(i):
            lower = self.ts[j]
            for l in lower.resources:
                if self.locality[l].is_local and local_ceiling(self.ts, self.alloc, l, core) > task.priority:
                    longest = max(longest, lower.max_section(l))
        return (1 + self.global_count(i)) * longest

    def dgb_low(self, i):
        task = self.ts[i]
        self._require_assigned(i)
        total = 0.0
        for k in task.resources:
            if not self.is_global(k):
                continue
            worst = max((self.ts[j].max_section(k) + self.alpha(j, k)
                         for j in self._remote_accessors(i, k) if self.ts[j].priority < task.priority),
                        default=0.0)
            total += task.access_count(k) * worst
        return total

    def dgb_high(self, i):
        task = self.ts[i]
        self._require_assigned(i)
        total = 0.0
        for k in task.resources:
            if not self.is_global(k):
                continue
            for j in self._remote_accessors(i, k):
                higher = self.ts[j]
                if higher.priority <= task.priority:
                    continue
                releases = math.ceil(task.period / higher.period)
                total += releases * (higher.total_section(k) + higher.access_count(k) * self.alpha(j, k))
        return total

    def mli(self, i):
        budget = 1 + self.global_count(i)
        total = 0.0
        for j in self._lower_on_core(i):
            n_global = self.global_count(j)
            if n_global == 0:
                continue
            lower = self.ts[j]
            longest = max(lower.max_section(k) for k in lower.resources if self.is_global(k))
            total += min(budget, 2 * n_global) * longest
        return total

    def breakdown(self, i):
        if i not in self._breakdowns:
            self._breakdowns[i] = BlockingBreakdown.of(self.dlb(i), self.dgb_low(i), self.dgb_high(i), self.mli(i))
            logger.debug('task %d blocking %s', i, self._breakdowns[i])
        return self._breakdowns[i]


def alpha(ts, alloc, j, k):
    return BlockingAnalysis(ts, alloc).alpha(j, k)


def dlb(ts, alloc, i):
    return BlockingAnalysis(ts, alloc).dlb(i)


def dgb_low(ts, alloc, i):
    return BlockingAnalysis(ts, alloc).dgb_low(i)


def dgb_high(ts, alloc, i):
    return BlockingAnalysis(ts, alloc).dgb_high(i)


def mli(ts, alloc, i):
    return BlockingAnalysis(ts, alloc).mli(i)


def worst_case_blocking(ts, alloc, i):
    """
    B_i = DLB_i + DGB_i^L + DGB_i^H + MLI_i for an assigned task.

    :return    BlockingBreakdown
    """
    return BlockingAnalysis(ts, alloc).breakdown(i)
