"""
Seeded synthetic task sets: uniform execution times, range constrained
utilizations, grouped shared resources with fixed-ratio critical sections,
and rate monotonic priorities.
"""
import os
import json
import math
import logging
import dataclasses
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .exceptions import ConfigError, Infeasible
from .model import CriticalSection, Task, TaskSet
from .rng import Xoshiro256

logger = logging.getLogger(__name__)

DEFAULTS = json.load(
    open(
        os.path.join(
            os.path.dirname(__file__),
            'resources', 'defaults.json'), 'r'))

_GENERATOR = DEFAULTS['generator']

CONSTRAINED = 'constrained'
UUNIFAST = 'uunifast'
MODES = (CONSTRAINED, UUNIFAST)

# Repair passes of the constrained sampler and redraws of plain UUnifast.
MAX_REPAIR_PASSES = 100
MAX_REDRAWS = 1000
SUM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class GenConfig:
    """
    Generator parameters; field defaults come from resources/defaults.json.

    :total_load             S, sum of task utilizations
    :wcet_range             Bounds of the uniform C_i draw (ms)
    :util_range             Bounds of every u_i; a degenerate [u, u] fixes all u_i = u
    :sections_per_task      Inclusive bounds of the per-task critical section count
    :resources_per_group    Resources in each group
    :tasks_per_group        Consecutive task ids sharing one group
    :cs_ratio               Critical section length as a fraction of C_i
    :seed                   64-bit seed
    :mode                   'constrained' (draw, rescale, repair) or 'uunifast'
    """
    total_load: float = _GENERATOR['total_load']
    wcet_range: Tuple[float, float] = tuple(_GENERATOR['wcet_range'])
    util_range: Tuple[float, float] = tuple(_GENERATOR['util_range'])
    sections_per_task: Tuple[int, int] = tuple(_GENERATOR['sections_per_task'])
    resources_per_group: int = _GENERATOR['resources_per_group']
    tasks_per_group: int = _GENERATOR['tasks_per_group']
    cs_ratio: float = _GENERATOR['cs_ratio']
    seed: int = _GENERATOR['seed']
    mode: str = _GENERATOR['mode']

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    @property
    def fixed_util(self):
        return self.util_range[0] == self.util_range[1]

    @property
    def task_count(self):
        """n = S / midpoint(util_range), rounded half up."""
        low, high = self.util_range
        return int(math.floor(self.total_load / ((low + high) / 2.0) + 0.5))

    @property
    def group_count(self):
        return int(math.ceil(self.task_count / float(self.tasks_per_group)))

    @property
    def resource_count(self):
        return self.group_count * self.resources_per_group

    def validate(self):
        low, high = self.util_range
        if not 0 < low <= high <= 1:
            raise ConfigError('util_range must lie within (0, 1] with low <= high, got %r' % (self.util_range,))
        if not 0 < self.wcet_range[0] <= self.wcet_range[1]:
            raise ConfigError('wcet_range must be positive with low <= high, got %r' % (self.wcet_range,))
        if not 0 <= self.sections_per_task[0] <= self.sections_per_task[1]:
            raise ConfigError('sections_per_task must be a non-negative range, got %r' % (self.sections_per_task,))
        if self.total_load <= 0:
            raise ConfigError('total_load must be positive, got %r' % self.total_load)
        if self.cs_ratio < 0 or self.cs_ratio * self.sections_per_task[1] > 1:
            raise ConfigError('critical sections would exceed the wcet: %r x %d > 1'
                              % (self.cs_ratio, self.sections_per_task[1]))
        if self.resources_per_group < 1 or self.tasks_per_group < 1:
            raise ConfigError('resources_per_group and tasks_per_group must be at least 1')
        if self.mode not in MODES:
            raise ConfigError('unknown generation mode %r' % self.mode)
        return self


def constrained_uunifast(total, n, util_range, rng):
    """
    n utilizations summing to `total`, each inside util_range: draw uniformly
    in the range, rescale to the target sum, then clamp and hand the residual
    to the entries with room left until the sum holds.

    :total         Target sum S
    :n             Number of utilizations
    :util_range    (low, high)
    :rng           Xoshiro256 stream
    :return        List of floats
    """
    low, high = util_range
    if not n * low - SUM_TOLERANCE <= total <= n * high + SUM_TOLERANCE:
        raise Infeasible('cannot split %r into %d utilizations within [%r, %r]' % (total, n, low, high))
    if n == 0:
        return []
    if n == 1:
        return [float(total)]
    if low == high:
        return [float(low)] * n

    utils = np.array([rng.uniform(low, high) for _ in range(n)])
    utils *= total / utils.sum()
    for passes in range(MAX_REPAIR_PASSES):
        utils = np.clip(utils, low, high)
        residual = total - utils.sum()
        if abs(residual) <= SUM_TOLERANCE * max(1.0, total):
            logger.debug('utilizations repaired in %d passes', passes)
            return [float(u) for u in utils]
        room = high - utils if residual > 0 else utils - low
        if room.sum() <= 0:
            break
        utils = utils + residual * room / room.sum()
    raise Infeasible('utilization repair did not converge for S=%r, n=%d' % (total, n))


def uunifast_discard(total, n, rng):
    """
    Classic UUnifast, redrawing any vector with an element outside (0, 1].
    """
    for attempt in range(MAX_REDRAWS):
        utils, remaining = [], float(total)
        for i in range(1, n):
            following = remaining * rng.random() ** (1.0 / (n - i))
            utils.append(remaining - following)
            remaining = following
        if n:
            utils.append(remaining)
        if all(0 < u <= 1 for u in utils):
            return utils
    raise Infeasible('uunifast produced no vector within (0, 1] in %d draws' % MAX_REDRAWS)


def generate(cfg, rng=None, trial=0):
    """
    Generate one task set.  Draw order: all execution times, then the
    utilizations, then per task its section count followed by the section
    resources.

    :cfg      GenConfig
    :rng      Optional Xoshiro256; the (cfg.seed, trial) stream by default
    :trial    Trial index selecting the stream when rng is omitted
    :return   TaskSet
    """
    cfg.validate()
    rng = rng or Xoshiro256.for_trial(cfg.seed, trial)
    n = cfg.task_count

    wcets = [rng.uniform(*cfg.wcet_range) for _ in range(n)]
    if cfg.fixed_util:
        utils = [float(cfg.util_range[0])] * n
    elif cfg.mode == UUNIFAST:
        utils = uunifast_discard(cfg.total_load, n, rng)
    else:
        utils = constrained_uunifast(cfg.total_load, n, cfg.util_range, rng)
    periods = [c / u for c, u in zip(wcets, utils)]

    priorities = [0] * n
    for rank, i in enumerate(sorted(range(n), key=lambda i: (periods[i], i))):
        priorities[i] = n - rank

    tasks = []
    for i in range(n):
        group = i // cfg.tasks_per_group
        count = rng.randint(*cfg.sections_per_task)
        sections = tuple(
            CriticalSection(group * cfg.resources_per_group + rng.randint(0, cfg.resources_per_group - 1),
                            wcets[i] * cfg.cs_ratio)
            for _ in range(count))
        tasks.append(Task(i, wcets[i], periods[i], priorities[i], sections))

    groups = dict((k, k // cfg.resources_per_group) for k in range(cfg.resource_count))
    return TaskSet(tuple(tasks), cfg.resource_count, groups)
