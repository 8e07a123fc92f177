"""
Experiment harness: minimum core sweeps, schedulable ratio sweeps, and the
single task set analysis report.

Every trial draws its task set from the (seed, trial) stream, so a trial
sees the same random numbers at every point of a sweep and both algorithms
of a trial consume the identical task set.
"""
import os
import time
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .blocking import BlockingAnalysis
from .exceptions import ConfigError, NotSchedulableWithinCap
from .formatters import format_as_csv
from .model import Allocation
from .partition import DEFAULT_BETA, allocator, pbu_table, search_cores
from .rta import is_schedulable
from .taskgen import DEFAULTS, GenConfig, generate
from .utils import dump_json, ensure_dir, tolerant_ceil

logger = logging.getLogger(__name__)

EXPERIMENT = DEFAULTS['experiment']

CORES = 'cores'
RATIO = 'ratio'

SWEEP_ALGORITHMS = ('brwfd', 'wfd')
RATIO_AXES = ('cs_ratio', 'util', 'core_multiple', 'resources_per_group')
COLUMNS = ('load', 'cs_ratio', 'util', 'resources_per_group', 'core_multiple', 'cores')
METRIC_COLUMNS = ('algorithm', 'metric', 'value', 'n_trials', 'n_failures')

OK = 'ok'
OVER_CAP = 'not_schedulable_within_cap'

CORE_MULTIPLE_NOTE = ('core multiple mu maps to m = ceil(mu * S): larger mu gives more cores, '
                      'the reverse of the literal load-to-cores ratio')


@dataclass(frozen=True)
class Point:
    """
    One configuration of a sweep.  util None keeps the generator's
    util_range; cores None means the core count is searched for.
    """
    load: float
    cs_ratio: float
    util: Optional[float] = None
    resources_per_group: Optional[int] = None
    core_multiple: Optional[float] = None
    cores: Optional[int] = None

    def config(self, base, seed):
        changes = dict(total_load=self.load, cs_ratio=self.cs_ratio, seed=seed)
        if self.util is not None:
            changes['util_range'] = (self.util, self.util)
        if self.resources_per_group is not None:
            changes['resources_per_group'] = self.resources_per_group
        return base.replace(**changes)

    def as_dict(self):
        return dict((key, getattr(self, key)) for key in COLUMNS if getattr(self, key) is not None)


@dataclass(frozen=True)
class SweepSpec:
    """
    :kind          CORES or RATIO
    :points        Sweep points, in output order
    :trials        Task sets per point
    :algorithms    Subset of SWEEP_ALGORITHMS
    :seed          Experiment seed
    :beta          BR-WFD weight
    :base          GenConfig the points are applied to
    :axis          Varying axis of a ratio sweep
    :cap           Core search cap, 8 * max(m0, 1) when None
    :jobs          Worker processes
    :timings       Whether records carry wall_time_ms
    """
    kind: str
    points: Tuple[Point, ...]
    trials: int = EXPERIMENT['trials']
    algorithms: Tuple[str, ...] = tuple(EXPERIMENT['algorithms'])
    seed: int = 0
    beta: float = EXPERIMENT['beta']
    base: GenConfig = field(default_factory=GenConfig)
    axis: Optional[str] = None
    cap: Optional[int] = None
    jobs: int = 1
    timings: bool = False

    def validate(self):
        if self.kind not in (CORES, RATIO):
            raise ConfigError('unknown sweep kind %r' % self.kind)
        if self.trials < 1:
            raise ConfigError('trials must be at least 1, got %d' % self.trials)
        if not self.algorithms:
            raise ConfigError('at least one algorithm is required')
        for name in self.algorithms:
            if name not in SWEEP_ALGORITHMS:
                raise ConfigError('unknown algorithm %r, expected %s' % (name, ' or '.join(SWEEP_ALGORITHMS)))
        if self.jobs < 1:
            raise ConfigError('jobs must be at least 1')
        if not self.points:
            raise ConfigError('a sweep needs at least one point')
        for point in self.points:
            if point.load <= 0 or point.cs_ratio < 0:
                raise ConfigError('load must be positive and cs_ratio non-negative: %r' % (point,))
            for value in (point.util, point.resources_per_group, point.core_multiple, point.cores):
                if value is not None and value <= 0:
                    raise ConfigError('axis values must be positive: %r' % (point,))
            point.config(self.base, self.seed).validate()
        return self


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    records: Tuple[dict, ...]
    summary: Tuple[dict, ...]

    def meta(self):
        meta = {
            'kind': self.spec.kind,
            'seed': self.spec.seed,
            'trials': self.spec.trials,
            'algorithms': list(self.spec.algorithms),
            'beta': self.spec.beta,
            'axis': self.spec.axis,
            'points': [point.as_dict() for point in self.spec.points],
            'generator': {
                'wcet_range': list(self.spec.base.wcet_range),
                'util_range': list(self.spec.base.util_range),
                'sections_per_task': list(self.spec.base.sections_per_task),
                'resources_per_group': self.spec.base.resources_per_group,
                'tasks_per_group': self.spec.base.tasks_per_group,
                'mode': self.spec.base.mode,
            },
        }
        if self.spec.axis == 'core_multiple':
            meta['note'] = CORE_MULTIPLE_NOTE
        return meta


def default_cores(load):
    """Fixed core count of the ratio sweeps when none is given: 2 * ceil(S)."""
    return EXPERIMENT['cores_per_load'] * tolerant_ceil(load)


def cores_spec(loads, cs_ratios, **kwargs):
    """SweepSpec over the load x cs_ratio grid, load-major."""
    points = tuple(Point(float(load), float(ratio)) for load in loads for ratio in cs_ratios)
    return SweepSpec(CORES, points, **kwargs).validate()


def ratio_spec(axis, values, load, cs_ratio=None, util=None, resources_per_group=None, cores=None, **kwargs):
    """
    SweepSpec varying exactly one axis, the others fixed.

    :axis      One of RATIO_AXES
    :values    Axis values
    :cs_ratio  Fixed critical section ratio, required unless it is the axis
    :cores     Fixed core count, default_cores(load) when None; ignored on the core_multiple axis
    """
    if axis not in RATIO_AXES:
        raise ConfigError('unknown axis %r, expected one of %s' % (axis, ', '.join(RATIO_AXES)))
    if cs_ratio is None and axis != 'cs_ratio':
        raise ConfigError('cs_ratio is required unless it is the swept axis')
    points = []
    for value in values:
        point = dict(load=float(load), cs_ratio=cs_ratio, util=util,
                     resources_per_group=resources_per_group)
        if axis == 'core_multiple':
            point['core_multiple'] = float(value)
            point['cores'] = tolerant_ceil(value * load)
        else:
            point[axis] = int(value) if axis == 'resources_per_group' else float(value)
            point['cores'] = cores if cores is not None else default_cores(load)
        points.append(Point(**point))
    return SweepSpec(RATIO, tuple(points), axis=axis, **kwargs).validate()


def _mean_blocking(outcome):
    blocking = [response.blocking.total for response in outcome.result.per_task.values()]
    return float(np.mean(blocking)) if blocking else 0.0


def run_trial(spec, index, trial):
    """
    Records of one (point, trial) pair, one per algorithm in spec order.
    """
    point = spec.points[index]
    ts = generate(point.config(spec.base, spec.seed), trial=trial)
    records = []
    for name in spec.algorithms:
        started = time.perf_counter()
        record = {'seed': spec.seed, 'trial': trial, 'point_index': index,
                  'point': point.as_dict(), 'algorithm': name}
        if spec.kind == CORES:
            try:
                cores, outcome = search_cores(ts, name, spec.cap, spec.beta)
                record.update(status=OK, cores_required=cores, mean_blocking_ms=_mean_blocking(outcome))
            except NotSchedulableWithinCap as e:
                logger.warning('trial %d at %r: %s with %s', trial, point.as_dict(), e, name)
                record.update(status=OVER_CAP, cores_required=None, mean_blocking_ms=None)
        else:
            outcome = allocator(name, spec.beta)(ts, point.cores)
            record.update(status=OK, schedulable=outcome.success)
        if spec.timings:
            record['wall_time_ms'] = (time.perf_counter() - started) * 1000.0
        records.append(record)
    return records


def _run_trial_args(args):
    return run_trial(*args)


def _row(point, algorithm, metric, value, n_trials, n_failures):
    row = dict((key, '') for key in COLUMNS)
    row.update(point)
    row.update(algorithm=algorithm, metric=metric, value=value, n_trials=n_trials, n_failures=n_failures)
    return row


def summarize(kind, points, records, algorithms):
    """
    Summary rows recomputed from raw records: per point and algorithm the
    mean core count and mean blocking (core sweeps) or the schedulable ratio
    (ratio sweeps).  Core sweeps with both algorithms add the paired
    reduction percentage over trials where both succeeded.

    :kind          CORES or RATIO
    :points        Point dicts indexed by point_index
    :records       Record dicts
    :algorithms    Algorithm names in output order
    :return        List of row dicts
    """
    by_point = {}
    for record in records:
        by_point.setdefault(record['point_index'], {}).setdefault(record['algorithm'], {})[record['trial']] = record

    rows = []
    for index, point in enumerate(points):
        groups = by_point.get(index, {})
        for name in algorithms:
            trials = groups.get(name, {})
            if kind == CORES:
                ok = [r for r in trials.values() if r['status'] == OK]
                failures = len(trials) - len(ok)
                cores = float(np.mean([r['cores_required'] for r in ok])) if ok else ''
                blocking = float(np.mean([r['mean_blocking_ms'] for r in ok])) if ok else ''
                rows.append(_row(point, name, 'mean_cores', cores, len(trials), failures))
                rows.append(_row(point, name, 'mean_blocking_ms', blocking, len(trials), failures))
            else:
                passed = sum(1 for r in trials.values() if r['schedulable'])
                ratio = passed / float(len(trials)) if trials else ''
                rows.append(_row(point, name, 'schedulable_ratio', ratio, len(trials), len(trials) - passed))

        if kind == CORES and 'brwfd' in groups and 'wfd' in groups:
            brwfd, wfd = groups['brwfd'], groups['wfd']
            paired = sorted(t for t in brwfd if t in wfd and brwfd[t]['status'] == OK and wfd[t]['status'] == OK)
            reduction = ''
            if paired:
                mean_brwfd = float(np.mean([brwfd[t]['cores_required'] for t in paired]))
                mean_wfd = float(np.mean([wfd[t]['cores_required'] for t in paired]))
                reduction = (mean_wfd - mean_brwfd) / mean_wfd * 100.0 if mean_wfd else 0.0
            total = len(set(brwfd) | set(wfd))
            rows.append(_row(point, 'brwfd', 'reduction_pct', reduction, len(paired), total - len(paired)))
    return rows


def run_sweep(spec):
    """
    Run every (point, trial) pair of a sweep, in a process pool when
    spec.jobs > 1.  Record order is (point, trial, algorithm) regardless
    of the number of workers.

    :return    SweepResult
    """
    spec.validate()
    work = [(spec, index, trial) for index in range(len(spec.points)) for trial in range(spec.trials)]
    logger.info('%s sweep: %d points x %d trials, algorithms %s, %d job(s)',
                spec.kind, len(spec.points), spec.trials, ','.join(spec.algorithms), spec.jobs)
    if spec.axis == 'core_multiple':
        logger.warning(CORE_MULTIPLE_NOTE)

    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            batches = list(pool.map(_run_trial_args, work, chunksize=max(1, len(work) // (spec.jobs * 4))))
    else:
        batches = [run_trial(*args) for args in work]

    order = dict((name, rank) for rank, name in enumerate(spec.algorithms))
    records = sorted((record for batch in batches for record in batch),
                     key=lambda r: (r['point_index'], r['trial'], order[r['algorithm']]))
    summary = summarize(spec.kind, [p.as_dict() for p in spec.points], records, spec.algorithms)
    for row in summary:
        logger.info('%s', row)
    return SweepResult(spec, tuple(records), tuple(summary))


def sweep_cores(spec):
    if spec.kind != CORES:
        raise ConfigError('sweep_cores needs a %r spec, got %r' % (CORES, spec.kind))
    return run_sweep(spec)


def sweep_ratio(spec):
    if spec.kind != RATIO:
        raise ConfigError('sweep_ratio needs a %r spec, got %r' % (RATIO, spec.kind))
    return run_sweep(spec)


def records_jsonl(records):
    return ''.join(dump_json(record) + '\n' for record in records)


def summary_csv(rows):
    """Summary rows as CSV, without the point columns no row sets."""
    axes = [key for key in COLUMNS if any(row[key] != '' for row in rows)]
    return format_as_csv(rows, axes + list(METRIC_COLUMNS))


def write_results(result, out):
    """
    Write records.jsonl, summary.csv and meta.json into the `out` directory.

    :return    List of written paths
    """
    ensure_dir(out)
    files = [
        ('records.jsonl', records_jsonl(result.records)),
        ('summary.csv', summary_csv(result.summary)),
        ('meta.json', dump_json(result.meta(), 2) + '\n'),
    ]
    paths = []
    for name, content in files:
        path = os.path.join(out, name)
        with open(path, 'w', newline='') as handle:
            handle.write(content)
        paths.append(path)
    return paths


def analyze(ts, alloc=None, cores=None, beta=DEFAULT_BETA):
    """
    Per-task PBU, blocking breakdown and response time for a given
    allocation, or for a fresh BR-WFD run at `cores` (searched for when
    None).

    :return    Report dict with 'cores', 'verdict', 'tasks' and, for fresh runs, 'trace'
    """
    table = pbu_table(ts, beta)
    report = {}
    if alloc is None:
        if cores is None:
            try:
                cores, outcome = search_cores(ts, 'brwfd', beta=beta)
            except NotSchedulableWithinCap as e:
                logger.warning('%s, reporting the allocation at the cap', e)
                outcome = allocator('brwfd', beta)(ts, e.cap)
        else:
            outcome = allocator('brwfd', beta)(ts, cores)
        alloc = outcome.allocation
        report['trace'] = [entry.as_dict() for entry in outcome.trace]
    elif not isinstance(alloc, Allocation):
        raise ConfigError('expected an Allocation, got %r' % type(alloc))

    result = is_schedulable(ts, alloc)
    analysis = BlockingAnalysis(ts, alloc)
    rows = []
    for i in alloc.assigned:
        response = result.per_task[i]
        row = {'id': i, 'priority': ts[i].priority, 'core': alloc.core_of(i), 'pbu': table.pbu[i]}
        row.update(analysis.breakdown(i).as_dict())
        row.update(wcrt_ms=response.wcrt, schedulable=response.schedulable)
        rows.append(row)

    unassigned = [task.id for task in ts if task.id not in alloc]
    report.update(cores=alloc.core_count, verdict=result.verdict if not unassigned else 'incomplete',
                  unassigned=unassigned, tasks=rows)
    return report
