class MpcpartException(Exception):
    pass


class ValidationException(MpcpartException):
    """
    A task set or allocation violates one of its invariants.

    :message    Human readable description
    :path       Optional key path into the offending document, like 'tasks[3].wcet_ms'
    :line       Optional 1-based line number in the source document
    """

    def __init__(self, message, path=None, line=None):
        self.reason = message
        self.path = path
        self.line = line
        location = []
        if line is not None:
            location.append('line %d' % line)
        if path:
            location.append(path)
        if location:
            message = '%s: %s' % (', '.join(location), message)
        MpcpartException.__init__(self, message)


class UnassignedTask(MpcpartException):
    pass


class NoAccessor(MpcpartException):
    pass


class Infeasible(MpcpartException):
    pass


class ConfigError(MpcpartException):
    pass


class NotSchedulableWithinCap(MpcpartException):
    def __init__(self, cap):
        self.cap = cap
        MpcpartException.__init__(self, 'not schedulable within %d cores' % cap)
