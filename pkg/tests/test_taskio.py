import json

import pytest

from mpcpart.exceptions import ValidationException
from mpcpart.taskgen import GenConfig, generate
from mpcpart.taskio import (dumps_allocation, dumps_taskset, parse_allocation, parse_taskset, read_allocation,
                            read_taskset)

BAD_WCET = """{
  "resource_count": 1,
  "tasks": [
    {"id": 0, "wcet_ms": 1.0, "period_ms": 4.0, "priority": 2, "sections": []},
    {"id": 1, "wcet_ms": -1.0, "period_ms": 10.0, "priority": 1, "sections": []}
  ]
}
"""


def test_read_f1(f1, f1_path, f1_alloc_path, f1_alloc):
    assert read_taskset(f1_path) == f1
    assert read_allocation(f1_alloc_path, f1) == f1_alloc


def test_errors_point_at_the_task():
    with pytest.raises(ValidationException) as e:
        parse_taskset(BAD_WCET)
    assert e.value.line == 5
    assert e.value.path == 'tasks[1].wcet_ms'
    assert str(e.value) == 'line 5, tasks[1].wcet_ms: wcet must be positive'


def test_malformed_json():
    with pytest.raises(ValidationException) as e:
        parse_taskset('{"resource_count": 1,\n "tasks": [}')
    assert e.value.line == 2
    assert 'malformed JSON' in str(e.value)


@pytest.mark.parametrize('document, path', [
    ({'tasks': []}, 'resource_count'),
    ({'resource_count': 1, 'tasks': {}}, 'tasks'),
    ({'resource_count': 1, 'tasks': [{'id': 0, 'wcet_ms': '1', 'period_ms': 2, 'priority': 1}]},
     'tasks[0].wcet_ms'),
    ({'resource_count': 1, 'tasks': [{'id': 0, 'wcet_ms': 1, 'period_ms': 2, 'priority': 1,
                                      'sections': [{'resource': 1.5, 'duration_ms': 0.1}]}]},
     'tasks[0].sections[0].resource'),
    ({'resource_count': 0, 'tasks': [{'id': 0, 'wcet_ms': 1, 'period_ms': 2, 'priority': 2}]},
     'tasks[*].priority'),
])
def test_invalid_documents(document, path):
    with pytest.raises(ValidationException) as e:
        parse_taskset(json.dumps(document))
    assert e.value.path == path


def test_empty_task_list():
    assert parse_taskset('{"resource_count": 0, "tasks": []}').n == 0


def test_generated_sets_survive_serialization():
    ts = generate(GenConfig(total_load=1.0))
    assert parse_taskset(dumps_taskset(ts)) == ts


def test_allocation_errors(f1):
    with pytest.raises(ValidationException) as e:
        parse_allocation('{"cores": 2, "assignment": {"2": 2}}', f1)
    assert e.value.path == 'assignment.2'
    with pytest.raises(ValidationException):
        parse_allocation('{"cores": 2, "assignment": {"7": 0}}', f1)
    with pytest.raises(ValidationException):
        parse_allocation('{"cores": 2}', f1)


def test_allocation_document(f1_alloc):
    assert json.loads(dumps_allocation(f1_alloc)) == {'cores': 2, 'assignment': {'0': 0, '1': 0, '2': 1}}


@pytest.mark.parametrize('task, path', [
    ('{"id": 0, "wcet_ms": 1.0, "period_ms": 4.0, "priority": 1, '
     '"sections": [{"resource": 0, "duration_ms": NaN}]}', 'tasks[0].sections[0].duration_ms'),
    ('{"id": 0, "wcet_ms": 1.0, "period_ms": Infinity, "priority": 1, "sections": []}', 'tasks[0].period_ms'),
    ('{"id": 0, "wcet_ms": NaN, "period_ms": 4.0, "priority": 1, "sections": []}', 'tasks[0].wcet_ms'),
])
def test_non_finite_values_are_rejected(task, path):
    with pytest.raises(ValidationException) as e:
        parse_taskset('{"resource_count": 1,\n "tasks": [\n  %s\n ]}' % task)
    assert e.value.path == path
    assert e.value.line == 3
    assert 'finite' in e.value.reason


def test_bad_groups_are_reported_as_groups():
    with pytest.raises(ValidationException) as e:
        parse_taskset('{"resource_count": 1, "tasks": [], "groups": {"0": "first"}}')
    assert e.value.path == 'groups'


def test_task_errors_keep_their_path_next_to_bad_groups():
    document = {'resource_count': 1, 'groups': {'0': 0},
                'tasks': [{'id': 0, 'wcet_ms': 1, 'period_ms': 2, 'priority': 1,
                           'sections': [{'resource': 3, 'duration_ms': 0.1}]}]}
    with pytest.raises(ValidationException) as e:
        parse_taskset(json.dumps(document))
    assert e.value.path == 'tasks[0].sections[0].resource'
