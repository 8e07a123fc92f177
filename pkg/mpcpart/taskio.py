"""
JSON interchange for task sets and allocations.

Task set document:
    {"resource_count": q,
     "tasks": [{"id", "wcet_ms", "period_ms", "priority",
                "sections": [{"resource", "duration_ms"}]}],
     "groups": {"<resource>": group}}          (optional)

Allocation document:
    {"cores": m, "assignment": {"<task id>": core}}
"""
import re
import json
import numbers

from .exceptions import ValidationException
from .model import Allocation, CriticalSection, Task, TaskSet
from .utils import dump_json

_TASKS_KEY = re.compile(r'"tasks"\s*:\s*\[')
_WHITESPACE = re.compile(r'[\s,]*')


def _element_lines(text):
    """
    Line number of every element of the top-level "tasks" array, so
    validation errors can point into the source document.

    :text      Raw JSON text
    :return    List of 1-based line numbers, possibly empty
    """
    match = _TASKS_KEY.search(text)
    if match is None:
        return []
    decoder, pos, lines = json.JSONDecoder(), match.end(), []
    try:
        while True:
            pos = _WHITESPACE.match(text, pos).end()
            if pos >= len(text) or text[pos] == ']':
                return lines
            lines.append(text.count('\n', 0, pos) + 1)
            _, pos = decoder.raw_decode(text, pos)
    except ValueError:
        return lines


def _load(text):
    try:
        return json.loads(text)
    except ValueError as e:
        raise ValidationException('malformed JSON: %s' % e.msg, line=getattr(e, 'lineno', None))


def _number(data, key, path, kind=numbers.Real):
    value = data.get(key) if isinstance(data, dict) else None
    if isinstance(value, bool) or not isinstance(value, kind):
        raise ValidationException('expected a %s' % ('integer' if kind is numbers.Integral else 'number'),
                                  '%s.%s' % (path, key) if path else key)
    return value


def _task(data, index):
    path = 'tasks[%d]' % index
    if not isinstance(data, dict):
        raise ValidationException('expected an object', path)
    sections = data.get('sections', [])
    if not isinstance(sections, list):
        raise ValidationException('expected a list', '%s.sections' % path)

    parsed = []
    for position, section in enumerate(sections):
        where = '%s.sections[%d]' % (path, position)
        if not isinstance(section, dict):
            raise ValidationException('expected an object', where)
        parsed.append(CriticalSection(_number(section, 'resource', where, numbers.Integral),
                                      float(_number(section, 'duration_ms', where))))

    period = float(_number(data, 'period_ms', path))
    deadline = float(_number(data, 'deadline_ms', path)) if 'deadline_ms' in data else None
    return Task(id=_number(data, 'id', path, numbers.Integral),
                wcet=float(_number(data, 'wcet_ms', path)),
                period=period,
                priority=_number(data, 'priority', path, numbers.Integral),
                sections=tuple(parsed),
                deadline=deadline)


def _groups(data):
    groups = data.get('groups')
    if groups is None:
        return None
    if not isinstance(groups, dict):
        raise ValidationException('expected an object', 'groups')
    try:
        return dict((int(k), int(v)) for k, v in groups.items())
    except (TypeError, ValueError) as e:
        raise ValidationException(str(e), 'groups')


def parse_taskset(text):
    """
    Parse and validate a task set document.

    :text      Raw JSON text
    :return    TaskSet
    """
    data = _load(text)
    if not isinstance(data, dict):
        raise ValidationException('expected a JSON object at the top level', line=1)
    tasks = data.get('tasks')
    if not isinstance(tasks, list):
        raise ValidationException('expected a list', 'tasks')

    lines = _element_lines(text)
    try:
        resource_count = _number(data, 'resource_count', None, numbers.Integral)
        parsed = [_task(task, index) for index, task in enumerate(tasks)]
        return TaskSet(tuple(parsed), resource_count, _groups(data)).validate()
    except ValidationException as e:
        if e.line is None and e.path:
            index = re.match(r'tasks\[(\d+)\]', e.path)
            if index and int(index.group(1)) < len(lines):
                raise ValidationException(e.reason, e.path, lines[int(index.group(1))])
        raise


def read_taskset(path):
    with open(path, 'r') as handle:
        return parse_taskset(handle.read())


def taskset_to_dict(ts):
    data = {
        'resource_count': ts.resource_count,
        'tasks': [{
            'id': task.id,
            'wcet_ms': task.wcet,
            'period_ms': task.period,
            'priority': task.priority,
            'sections': [{'resource': s.resource, 'duration_ms': s.duration} for s in task.sections],
        } for task in ts],
    }
    if ts.groups is not None:
        data['groups'] = dict((str(k), ts.groups[k]) for k in sorted(ts.groups))
    return data


def dumps_taskset(ts, indent=2):
    return dump_json(taskset_to_dict(ts), indent)


def parse_allocation(text, ts):
    """
    Parse an allocation document against the task set it refers to.

    :text      Raw JSON text
    :ts        TaskSet
    :return    Allocation
    """
    data = _load(text)
    if not isinstance(data, dict):
        raise ValidationException('expected a JSON object at the top level', line=1)
    cores = _number(data, 'cores', None, numbers.Integral)
    if cores < 0:
        raise ValidationException('core count must be non-negative', 'cores')
    assignment = data.get('assignment')
    if not isinstance(assignment, dict):
        raise ValidationException('expected an object', 'assignment')

    mapping = {}
    for key, core in assignment.items():
        path = 'assignment.%s' % key
        try:
            task_id = int(key)
        except ValueError:
            raise ValidationException('task ids must be integers', path)
        if not 0 <= task_id < ts.n:
            raise ValidationException('unknown task %d' % task_id, path)
        if isinstance(core, bool) or not isinstance(core, int) or not 0 <= core < cores:
            raise ValidationException('core must be an integer in 0..%d' % (cores - 1), path)
        mapping[task_id] = core
    return Allocation.from_assignment(ts, cores, mapping)


def read_allocation(path, ts):
    with open(path, 'r') as handle:
        return parse_allocation(handle.read(), ts)


def dumps_allocation(alloc):
    return dump_json(alloc.as_dict(), 2)
