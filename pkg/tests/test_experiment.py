import io
import os
import csv
import json

import pytest

from mpcpart.exceptions import ConfigError
from mpcpart.experiment import (CORE_MULTIPLE_NOTE, CORES, OK, OVER_CAP, RATIO, analyze, cores_spec,
                                default_cores, ratio_spec, records_jsonl, run_sweep, summarize, summary_csv,
                                sweep_cores, sweep_ratio, write_results)
from mpcpart.model import TaskSet


def small_cores_spec(**kwargs):
    options = dict(trials=10, seed=42)
    options.update(kwargs)
    return cores_spec([1.0, 2.0], [0.08, 0.16], **options)


def rows_by(summary, metric, algorithm):
    return [row for row in summary if row['metric'] == metric and row['algorithm'] == algorithm]


def test_cores_sweep_is_reproducible_across_workers():
    single = sweep_cores(small_cores_spec(jobs=1))
    again = sweep_cores(small_cores_spec(jobs=1))
    pooled = sweep_cores(small_cores_spec(jobs=2))
    assert records_jsonl(single.records) == records_jsonl(again.records)
    assert records_jsonl(single.records) == records_jsonl(pooled.records)
    assert summary_csv(single.summary) == summary_csv(pooled.summary)


def test_one_record_per_point_trial_and_algorithm():
    result = run_sweep(small_cores_spec(trials=3))
    keys = [(r['point_index'], r['trial'], r['algorithm']) for r in result.records]
    assert keys == [(p, t, a) for p in range(4) for t in range(3) for a in ('brwfd', 'wfd')]
    assert all('wall_time_ms' not in r for r in result.records)
    assert all(r['status'] == OK and r['cores_required'] >= 1 for r in result.records)


def test_summary_is_recomputable_from_records(tmp_path):
    result = run_sweep(small_cores_spec(trials=4))
    write_results(result, str(tmp_path))
    with open(os.path.join(str(tmp_path), 'records.jsonl')) as handle:
        records = [json.loads(line) for line in handle]
    points = [point.as_dict() for point in result.spec.points]
    assert summarize(CORES, points, records, ('brwfd', 'wfd')) == list(result.summary)

    with open(os.path.join(str(tmp_path), 'summary.csv')) as handle:
        text = handle.read()
    assert text.splitlines()[0] == 'load,cs_ratio,algorithm,metric,value,n_trials,n_failures'
    assert text == summary_csv(summarize(CORES, points, records, ('brwfd', 'wfd')))
    assert len(list(csv.DictReader(io.StringIO(text)))) == 4 * 5

    with open(os.path.join(str(tmp_path), 'meta.json')) as handle:
        meta = json.load(handle)
    assert meta['seed'] == 42 and meta['kind'] == CORES


def test_reduction_uses_paired_successes():
    point = {'load': 1.0, 'cs_ratio': 0.1}

    def record(trial, algorithm, cores):
        status = OK if cores is not None else OVER_CAP
        return {'point_index': 0, 'trial': trial, 'algorithm': algorithm, 'status': status,
                'cores_required': cores, 'mean_blocking_ms': 0.0 if cores else None}

    records = [record(0, 'brwfd', 2), record(0, 'wfd', 3),
               record(1, 'brwfd', 3), record(1, 'wfd', 3),
               record(2, 'brwfd', 2), record(2, 'wfd', None)]
    summary = summarize(CORES, [point], records, ('brwfd', 'wfd'))
    mean_wfd = rows_by(summary, 'mean_cores', 'wfd')[0]
    assert mean_wfd['value'] == 3.0 and mean_wfd['n_failures'] == 1
    assert rows_by(summary, 'mean_cores', 'brwfd')[0]['value'] == pytest.approx(7 / 3.0)
    reduction = rows_by(summary, 'reduction_pct', 'brwfd')[0]
    assert reduction['value'] == pytest.approx((3.0 - 2.5) / 3.0 * 100)
    assert reduction['n_trials'] == 2 and reduction['n_failures'] == 1


def test_timings_are_opt_in():
    result = run_sweep(cores_spec([1.0], [0.1], trials=1, timings=True))
    assert all(r['wall_time_ms'] >= 0 for r in result.records)


def test_zero_cs_ratio_with_ample_cores_is_always_schedulable():
    result = sweep_ratio(ratio_spec('cs_ratio', [0.0], load=2.0, cores=8, trials=5))
    for algorithm in ('brwfd', 'wfd'):
        assert rows_by(result.summary, 'schedulable_ratio', algorithm)[0]['value'] == 1.0


def test_core_multiple_sets_the_core_count():
    spec = ratio_spec('core_multiple', [1.0, 1.5, 2.0], load=2.0, cs_ratio=0.1, cores=99, trials=1)
    assert [point.cores for point in spec.points] == [2, 3, 4]
    result = run_sweep(spec)
    assert result.meta()['note'] == CORE_MULTIPLE_NOTE


def test_fixed_axes_default_cores():
    spec = ratio_spec('util', [0.1, 0.12], load=3.0, cs_ratio=0.1, trials=1)
    assert default_cores(3.0) == 6
    assert [point.cores for point in spec.points] == [6, 6]
    assert [point.util for point in spec.points] == [0.1, 0.12]


@pytest.mark.parametrize('build', [
    lambda: cores_spec([1.0], [0.1], trials=0),
    lambda: cores_spec([1.0], [0.1], algorithms=()),
    lambda: cores_spec([1.0], [0.1], algorithms=('exhaustive',)),
    lambda: cores_spec([-1.0], [0.1]),
    lambda: cores_spec([], [0.1]),
    lambda: ratio_spec('cores', [1], load=1.0, cs_ratio=0.1),
    lambda: ratio_spec('util', [0.1], load=1.0),
    lambda: ratio_spec('resources_per_group', [0], load=1.0, cs_ratio=0.1),
])
def test_invalid_sweeps(build):
    with pytest.raises(ConfigError):
        build()


def test_sweep_kind_must_match():
    with pytest.raises(ConfigError):
        sweep_ratio(cores_spec([1.0], [0.1], trials=1))


def test_analyze_f1(f1, f1_alloc):
    report = analyze(f1, f1_alloc)
    assert report['verdict'] == 'schedulable'
    assert [row['wcrt_ms'] for row in report['tasks']] == [1.5, 3.0, 4.0]
    assert [row['total'] for row in report['tasks']] == [0.5, 0.0, 1.0]
    assert [row['pbu'] for row in report['tasks']] == pytest.approx([0.2625, 0.2, 0.155], abs=1e-12)


def test_analyze_fresh_brwfd_run(f1):
    report = analyze(f1)
    assert report['cores'] == 1 and report['verdict'] == 'schedulable'
    assert analyze(f1, cores=2)['trace'][2]['branch'] == 'fallback'


def test_analyze_empty_set():
    report = analyze(TaskSet((), 0))
    assert report['tasks'] == [] and report['verdict'] == 'schedulable'


@pytest.mark.slow
@pytest.mark.xfail(strict=False, reason=(
    "dense group sharing makes DGB^H dominate at S=8: BR-WFD needs 43-51 cores for 64 tasks, "
    "the similarity branch fires in 3-6 of 64 placements, and the reduction stays outside 15-40%"))
def test_reduction_at_the_table_corners():
    result = run_sweep(cores_spec([1.0, 8.0], [0.08, 0.16], trials=100, seed=0, jobs=os.cpu_count() or 1))
    reductions = dict(((row['load'], row['cs_ratio']), row['value'])
                      for row in result.summary if row['metric'] == 'reduction_pct')
    assert 15.0 <= reductions[(8.0, 0.16)] <= 40.0
    assert -3.0 <= reductions[(1.0, 0.08)] <= 8.0


@pytest.mark.slow
@pytest.mark.xfail(strict=False, reason=(
    "at u=0.17, S=8 both allocators schedule 0% of sets on 16, 24 and 32 cores; "
    "DGB^H reaches 115-270 ms against periods of 287-559 ms and only one task per core (m=47) passes"))
def test_high_fixed_utilization_favours_brwfd():
    result = run_sweep(ratio_spec('util', [0.17], load=8.0, cs_ratio=0.12, trials=100, seed=0,
                                  jobs=os.cpu_count() or 1))
    brwfd = rows_by(result.summary, 'schedulable_ratio', 'brwfd')[0]['value']
    wfd = rows_by(result.summary, 'schedulable_ratio', 'wfd')[0]['value']
    assert brwfd - wfd >= 0.3
    assert wfd <= 0.2 and brwfd >= 0.6


def _violations(values, direction):
    return sum(1 for a, b in zip(values, values[1:]) if (b - a) * direction < 0)


@pytest.mark.slow
@pytest.mark.parametrize('axis, values, direction', [
    ('cs_ratio', [0.06, 0.09, 0.12, 0.15, 0.18], -1),
    ('core_multiple', [1.0, 1.25, 1.5, 2.0, 3.0], 1),
])
def test_schedulable_ratio_trends(axis, values, direction):
    result = run_sweep(ratio_spec(axis, values, load=8.0, cs_ratio=0.12, trials=100, seed=0,
                                  jobs=os.cpu_count() or 1))
    for algorithm in ('brwfd', 'wfd'):
        ratios = [row['value'] for row in rows_by(result.summary, 'schedulable_ratio', algorithm)]
        assert _violations(ratios, direction) <= 1
