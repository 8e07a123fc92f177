import os
import json

from mpcpart import interface
from mpcpart.taskio import parse_taskset


def run(capsys, *args):
    code = interface.main(*args)
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_json(capsys, f1_path, f1_alloc_path):
    code, out, _ = run(capsys, 'analyze', f1_path, '--allocation', f1_alloc_path, '--format', 'json')
    assert code == 0
    report = json.loads(out)
    assert report['verdict'] == 'schedulable'
    assert [task['wcrt_ms'] for task in report['tasks']] == [1.5, 3.0, 4.0]
    assert [task['dgb_low'] for task in report['tasks']] == [0.5, 0.0, 0.0]


def test_analyze_table(capsys, f1_path):
    code, out, _ = run(capsys, 'analyze', f1_path, '--cores', '2')
    assert code == 0
    assert 'Verdict: schedulable' in out
    assert 'wcrt_ms' in out


def test_analyze_empty_task_list(capsys, tmp_path):
    path = tmp_path / 'empty.json'
    path.write_text('{"resource_count": 0, "tasks": []}')
    code, _, _ = run(capsys, 'analyze', str(path))
    assert code == 0


def test_malformed_json_is_an_input_error(capsys, tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{"tasks": [')
    code, out, err = run(capsys, 'analyze', str(path))
    assert code == 2
    assert out == ''
    assert err.startswith('Error: line 1')


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, 'analyze', str(tmp_path / 'absent.json'))
    assert code == 2
    assert 'Error:' in err


def test_usage_errors(capsys):
    assert run(capsys, 'bogus')[0] == 1
    assert run(capsys, 'analyze')[0] == 1
    assert run(capsys, 'sweep-ratio', '--trials', '1')[0] == 1


def test_help(capsys):
    code, out, _ = run(capsys, '--help')
    assert code == 0
    assert 'sweep-cores' in out


def test_partition_writes_an_allocation(capsys, f1_path, tmp_path):
    target = str(tmp_path / 'allocation.json')
    code, out, _ = run(capsys, 'partition', f1_path, '--cores', '2', '--out', target, '--format', 'json')
    assert code == 0
    assert json.loads(out)['cores'][1]['tasks'] == [1, 2]
    with open(target) as handle:
        assert json.load(handle) == {'cores': 2, 'assignment': {'0': 0, '1': 1, '2': 1}}

    code, out, _ = run(capsys, 'analyze', f1_path, '--allocation', target, '--format', 'json')
    assert code == 0
    assert [task['wcrt_ms'] for task in json.loads(out)['tasks']] == [1.5, 2.5, 6.0]


def test_partition_searches_the_core_count(capsys, f1_path):
    code, out, _ = run(capsys, 'partition', f1_path, '--algorithm', 'wfd', '--format', 'json')
    assert code == 0
    assert json.loads(out)['core_count'] == 1


def test_gen(capsys):
    code, out, _ = run(capsys, 'gen', '--load', '1.0', '--seed', '3')
    assert code == 0
    assert parse_taskset(out).n == 8

    code, out, _ = run(capsys, 'gen', '--load', '1.0', '--trials', '2')
    assert code == 0
    assert len(out.strip().splitlines()) == 2


def test_gen_to_directory(capsys, tmp_path):
    code, _, _ = run(capsys, 'gen', '--load', '1.0', '--trials', '3', '--out', str(tmp_path))
    assert code == 0
    assert sorted(os.listdir(str(tmp_path))) == ['taskset_0000.json', 'taskset_0001.json', 'taskset_0002.json']


def test_gen_rejects_bad_config(capsys):
    assert run(capsys, 'gen', '--cs-ratio', '0.5')[0] == 2


def test_sweep_cores_records_are_byte_identical(capsys, tmp_path):
    outputs = []
    for jobs in ('1', '1', '2'):
        target = str(tmp_path / ('run%d' % len(outputs)))
        code, out, _ = run(capsys, 'sweep-cores', '--seed', '42', '--trials', '10', '--load', '1', '2',
                           '--cs-ratio', '0.08', '0.16', '--jobs', jobs, '--out', target)
        assert code == 0
        assert out.startswith('load,cs_ratio,algorithm,metric,value,n_trials,n_failures')
        with open(os.path.join(target, 'records.jsonl'), 'rb') as handle:
            outputs.append(handle.read())
    assert outputs[0] == outputs[1] == outputs[2]


def test_sweep_ratio(capsys):
    code, out, _ = run(capsys, 'sweep-ratio', '--axis', 'cs-ratio', '--cs-ratio', '0', '0.1', '--load', '1',
                       '--trials', '2', '--format', 'json')
    assert code == 0
    rows = json.loads(out)
    assert [row['cs_ratio'] for row in rows] == [0.0, 0.0, 0.1, 0.1]
    assert all(row['cores'] == 2 for row in rows)


def test_sweep_ratio_needs_single_fixed_values(capsys):
    code, _, err = run(capsys, 'sweep-ratio', '--axis', 'util', '--cs-ratio', '0.1', '0.2', '--trials', '1')
    assert code == 2
    assert '--cs-ratio' in err


def test_sweep_rejects_zero_trials(capsys):
    assert run(capsys, 'sweep-cores', '--trials', '0', '--load', '1')[0] == 2
