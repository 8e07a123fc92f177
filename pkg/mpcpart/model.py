"""
Task, resource and allocation model for partitioned fixed-priority systems
sharing resources under MPCP.

Durations are milliseconds held as floats, priorities are integers where a
larger value means a higher priority.  Every type here is immutable;
`Allocation.extend` returns a new allocation.
"""
import math
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple

from .exceptions import NoAccessor, UnassignedTask, ValidationException

# Relative slack allowed when checking that critical sections fit in the WCET.
SECTION_SLACK = 1e-9


@dataclass(frozen=True)
class CriticalSection:
    resource: int
    duration: float


@dataclass(frozen=True)
class Task:
    """
    One periodic task with an implicit deadline.

    :id          Index of the task in its task set
    :wcet        Worst-case execution time C_i
    :period      Period T_i
    :priority    Fixed priority, larger is higher
    :sections    Critical sections, one resource each
    :deadline    Relative deadline; defaults to (and must equal) the period
    """
    id: int
    wcet: float
    period: float
    priority: int
    sections: Tuple[CriticalSection, ...] = ()
    deadline: Optional[float] = None
    _count: Mapping[int, int] = field(init=False, repr=False, compare=False)
    _longest: Mapping[int, float] = field(init=False, repr=False, compare=False)
    _total: Mapping[int, float] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'sections', tuple(self.sections))
        if self.deadline is None:
            object.__setattr__(self, 'deadline', self.period)

        count, longest, total = {}, {}, {}
        for section in self.sections:
            k = section.resource
            count[k] = count.get(k, 0) + 1
            longest[k] = max(longest.get(k, 0.0), section.duration)
            total[k] = total.get(k, 0.0) + section.duration
        object.__setattr__(self, '_count', count)
        object.__setattr__(self, '_longest', longest)
        object.__setattr__(self, '_total', total)

    @property
    def utilization(self):
        return self.wcet / self.period

    @property
    def resources(self):
        """Theta_i, the distinct resources this task accesses, ascending."""
        return tuple(sorted(self._count))

    def accesses(self, k):
        return k in self._count

    def access_count(self, k):
        """N_{i,k}"""
        return self._count.get(k, 0)

    def max_section(self, k):
        """gamma_{i,k}^max; 0 when the resource is not accessed."""
        return self._longest.get(k, 0.0)

    def total_section(self, k):
        """gamma_{i,k}^total; 0 when the resource is not accessed."""
        return self._total.get(k, 0.0)

    def validate(self, resource_count=None, path=None):
        path = path or 'tasks[%d]' % self.id
        for name, value in (('wcet_ms', self.wcet), ('period_ms', self.period), ('deadline_ms', self.deadline)):
            if not math.isfinite(value):
                raise ValidationException('%s must be finite, got %r' % (name, value), '%s.%s' % (path, name))
        if not self.wcet > 0:
            raise ValidationException('wcet must be positive', '%s.wcet_ms' % path)
        if not self.period > 0:
            raise ValidationException('period must be positive', '%s.period_ms' % path)
        if self.deadline != self.period:
            raise ValidationException('deadline must equal the period', '%s.deadline_ms' % path)
        if self.wcet > self.deadline:
            raise ValidationException('wcet %r exceeds deadline %r' % (self.wcet, self.deadline),
                                      '%s.wcet_ms' % path)
        for index, section in enumerate(self.sections):
            where = '%s.sections[%d]' % (path, index)
            if not math.isfinite(section.duration):
                raise ValidationException('section duration must be finite, got %r' % section.duration,
                                          '%s.duration_ms' % where)
            if section.duration < 0:
                raise ValidationException('section duration must be non-negative', '%s.duration_ms' % where)
            if section.resource < 0 or (resource_count is not None and section.resource >= resource_count):
                raise ValidationException('resource %d outside the resource universe' % section.resource,
                                          '%s.resource' % where)
        if sum(s.duration for s in self.sections) > self.wcet * (1 + SECTION_SLACK):
            raise ValidationException('critical sections exceed the wcet', '%s.sections' % path)


@dataclass(frozen=True)
class TaskSet:
    """
    Ordered collection of tasks over the resource universe {0, ..., q-1}.

    :tasks             Tasks, task i at index i
    :resource_count    q
    :groups            Optional resource -> group index metadata from the generator
    """
    tasks: Tuple[Task, ...]
    resource_count: int
    groups: Optional[Mapping[int, int]] = None
    _accessors: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'tasks', tuple(self.tasks))
        if self.groups is not None:
            object.__setattr__(self, 'groups', dict(self.groups))

        accessors = [[] for _ in range(max(self.resource_count, 0))]
        for task in self.tasks:
            for k in task.resources:
                if 0 <= k < len(accessors):
                    accessors[k].append(task.id)
        object.__setattr__(self, '_accessors', tuple(tuple(ids) for ids in accessors))

    def __len__(self):
        return len(self.tasks)

    def __iter__(self):
        return iter(self.tasks)

    def __getitem__(self, task_id):
        return self.tasks[task_id]

    @property
    def n(self):
        return len(self.tasks)

    @property
    def utilization(self):
        return math.fsum(task.utilization for task in self.tasks)

    @property
    def base_priority(self):
        """Pi_b, one above every base priority."""
        return self.n + 1

    def accessors(self, k):
        """Ids of the tasks accessing resource k, ascending."""
        return self._accessors[k]

    def validate(self):
        """
        Check every task set invariant, raising ValidationException on the
        first violation.
        """
        if self.resource_count < 0:
            raise ValidationException('resource_count must be non-negative', 'resource_count')
        for index, task in enumerate(self.tasks):
            if task.id != index:
                raise ValidationException('task ids must be contiguous from 0, found %d' % task.id,
                                          'tasks[%d].id' % index)
            task.validate(self.resource_count)

        priorities = sorted(task.priority for task in self.tasks)
        if priorities != list(range(1, self.n + 1)):
            raise ValidationException('priorities must be a permutation of 1..%d' % self.n, 'tasks[*].priority')

        if self.groups is not None:
            for k in self.groups:
                if not 0 <= k < self.resource_count:
                    raise ValidationException('group metadata names unknown resource %d' % k, 'groups')
        return self


@dataclass(frozen=True)
class Allocation:
    """
    Task to core mapping, possibly partial.

    :core_count         m
    :assignment         task id -> core index
    :core_tasks         tau(p_j), task ids per core in insertion order
    :utilization        U^j per core
    :blocking_load      BU^j per core (sum of the loads passed to `extend`)
    """
    core_count: int
    assignment: Mapping[int, int]
    core_tasks: Tuple[Tuple[int, ...], ...]
    utilization: Tuple[float, ...]
    blocking_load: Tuple[float, ...]

    @classmethod
    def empty(cls, core_count):
        return cls(core_count, {}, ((),) * core_count,
                   (0.0,) * core_count, (0.0,) * core_count)

    @classmethod
    def from_assignment(cls, ts, core_count, assignment, loads=None):
        """
        Build an allocation from a task id -> core mapping, adding tasks in id order.

        :ts             TaskSet the ids refer to
        :core_count     m
        :assignment     Mapping of task id to core
        :loads          Optional per-task blocking loads (defaults to utilization)
        """
        alloc = cls.empty(core_count)
        for task_id in sorted(assignment):
            load = loads[task_id] if loads is not None else None
            alloc = alloc.extend(ts[task_id], assignment[task_id], load)
        return alloc

    def extend(self, task, core, load=None):
        """
        Copy of this allocation with `task` placed on `core`.

        :task    Task to place; must not already be assigned
        :core    Core index < core_count
        :load    Contribution to BU^core, the task's utilization if omitted
        """
        if not 0 <= core < self.core_count:
            raise ValidationException('core %d outside 0..%d' % (core, self.core_count - 1))
        if task.id in self.assignment:
            raise ValidationException('task %d is already assigned' % task.id)

        assignment: Dict[int, int] = dict(self.assignment)
        assignment[task.id] = core
        load = task.utilization if load is None else load

        core_tasks = list(self.core_tasks)
        core_tasks[core] = core_tasks[core] + (task.id,)
        utilization = list(self.utilization)
        utilization[core] += task.utilization
        blocking = list(self.blocking_load)
        blocking[core] += load
        return Allocation(self.core_count, assignment, tuple(core_tasks),
                          tuple(utilization), tuple(blocking))

    def __contains__(self, task_id):
        return task_id in self.assignment

    def __len__(self):
        return len(self.assignment)

    def core_of(self, task_id):
        """Core of an assigned task; raises UnassignedTask otherwise."""
        try:
            return self.assignment[task_id]
        except KeyError:
            raise UnassignedTask('task %d is not assigned' % task_id)

    @property
    def assigned(self):
        return tuple(sorted(self.assignment))

    def as_dict(self):
        return {
            'cores': self.core_count,
            'assignment': dict((str(i), self.assignment[i]) for i in self.assigned),
        }


@dataclass(frozen=True)
class Locality:
    """Classification of one resource under an allocation."""
    kind: str
    core: Optional[int] = None

    LOCAL = 'local'
    GLOBAL = 'global'
    UNUSED = 'unused'

    @classmethod
    def local(cls, core):
        return cls(cls.LOCAL, core)

    @property
    def is_global(self):
        return self.kind == self.GLOBAL

    @property
    def is_local(self):
        return self.kind == self.LOCAL

    def __str__(self):
        return 'local(%d)' % self.core if self.is_local else self.kind


GLOBAL = Locality(Locality.GLOBAL)
UNUSED = Locality(Locality.UNUSED)


def resource_locality(ts, alloc):
    """
    Classify every resource as Local(core), Global or Unused considering only
    the assigned tasks.

    :return    Tuple of Locality indexed by resource id
    """
    localities = []
    for k in range(ts.resource_count):
        cores = set(alloc.assignment[i] for i in ts.accessors(k) if i in alloc.assignment)
        if not cores:
            localities.append(UNUSED)
        elif len(cores) == 1:
            localities.append(Locality.local(cores.pop()))
        else:
            localities.append(GLOBAL)
    return tuple(localities)


def ceiling_priority(ts, k):
    """
    Omega_k = Pi_b + Pi_h with Pi_b = n + 1 and Pi_h the highest priority
    among the tasks accessing r_k.
    """
    if not ts.accessors(k):
        raise NoAccessor('resource %d is not accessed by any task' % k)
    return ts.base_priority + max(ts[i].priority for i in ts.accessors(k))


def local_ceiling(ts, alloc, k, core):
    """PCP ceiling of r_k counting only its accessors assigned to `core`."""
    on_core = [ts[i].priority for i in ts.accessors(k) if alloc.assignment.get(i) == core]
    if not on_core:
        raise NoAccessor('resource %d has no accessor on core %d' % (k, core))
    return ts.base_priority + max(on_core)


def lp_hp_sets(ts, alloc, i):
    """
    Lower and higher priority tasks sharing task i's core.

    :return    (lp, hp) as tuples of task ids, ascending
    """
    core = alloc.core_of(i)
    priority = ts[i].priority
    lp = tuple(sorted(j for j in alloc.core_tasks[core] if ts[j].priority < priority))
    hp = tuple(sorted(j for j in alloc.core_tasks[core] if ts[j].priority > priority))
    return lp, hp
