"""
Worst-case response-time iteration with MPCP blocking and the
allocation-level schedulability verdict built on it.
"""
import logging
import math
from dataclasses import dataclass
from typing import Mapping, Optional

from .blocking import BlockingAnalysis, BlockingBreakdown
from .model import lp_hp_sets

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DeadlineMiss:
    """The iteration crossed the deadline; `last` is the offending iterate."""
    last: float


@dataclass(frozen=True)
class TaskResponse:
    wcrt: float
    blocking: BlockingBreakdown
    schedulable: bool

    def as_dict(self):
        return {
            'wcrt_ms': self.wcrt,
            'blocking': self.blocking.as_dict(),
            'schedulable': self.schedulable,
        }


@dataclass(frozen=True)
class RtaResult:
    """
    :per_task       task id -> TaskResponse, ascending ids
    :failed_task    Lowest failing task id, None when schedulable
    """
    per_task: Mapping[int, TaskResponse]
    failed_task: Optional[int] = None

    @property
    def schedulable(self):
        return self.failed_task is None

    @property
    def verdict(self):
        return 'schedulable' if self.schedulable else 'unschedulable(%d)' % self.failed_task

    def as_dict(self):
        return {
            'verdict': 'schedulable' if self.schedulable else 'unschedulable',
            'failed_task': self.failed_task,
            'tasks': [dict(id=i, **self.per_task[i].as_dict()) for i in sorted(self.per_task)],
        }


def wcrt(ts, alloc, i, analysis=None):
    """
    Fixed point of W = C_i + B_i + sum over hp(i) of
    ceil((W + DGB_i^H + DGB_i^L) / T_j) * C_j, seeded with
    C_i + DGB_i^H + DGB_i^L.

    :analysis    Optional BlockingAnalysis of the same allocation, reused when given
    :return      float, or DeadlineMiss as soon as an iterate exceeds D_i
    """
    analysis = analysis or BlockingAnalysis(ts, alloc)
    task = ts[i]
    _, hp = lp_hp_sets(ts, alloc, i)
    blocking = analysis.breakdown(i)
    remote = blocking.dgb_high + blocking.dgb_low
    base = task.wcet + blocking.total
    interferers = [ts[j] for j in hp]

    current = task.wcet + remote
    if current > task.deadline:
        return DeadlineMiss(current)

    iterations = 0
    while True:
        iterations += 1
        following = base + sum(math.ceil((current + remote) / other.period) * other.wcet
                               for other in interferers)
        if following > task.deadline:
            logger.debug('task %d misses its deadline after %d iterations (%r)', i, iterations, following)
            return DeadlineMiss(following)
        if following == current:
            return following
        current = following


def is_schedulable(ts, alloc, stop_at_first=False):
    """
    Run the response-time test for every assigned task, in id order.

    :stop_at_first    Stop at the first failing task instead of analyzing all of them
    :return           RtaResult
    """
    analysis = BlockingAnalysis(ts, alloc)
    per_task, failed = {}, None
    for i in alloc.assigned:
        response = wcrt(ts, alloc, i, analysis)
        if isinstance(response, DeadlineMiss):
            per_task[i] = TaskResponse(response.last, analysis.breakdown(i), False)
            if failed is None:
                failed = i
            if stop_at_first:
                break
        else:
            per_task[i] = TaskResponse(response, analysis.breakdown(i), True)
    return RtaResult(per_task, failed)
