from .model import Allocation, CriticalSection, Task, TaskSet
from .blocking import worst_case_blocking
from .rta import is_schedulable, wcrt
from .partition import allocate_brwfd, allocate_exhaustive, allocate_wfd, min_cores
from .taskgen import GenConfig, generate
from .exceptions import (MpcpartException, ValidationException, UnassignedTask, NoAccessor,
                         Infeasible, ConfigError, NotSchedulableWithinCap)
from .interface import main
