import os
import json
import math

# Slack under which a load is treated as landing exactly on an integer.
LOAD_SLACK = 1e-9


def tolerant_ceil(value, slack=LOAD_SLACK):
    """
    Ceiling that ignores floating point noise just above an integer, so a
    generated load of 8.000000000001 still needs 8 cores.

    :value    float
    :slack    Absolute noise tolerated above an integer
    :return   int
    """
    return max(int(math.ceil(value - slack)), 0)


def ensure_dir(path):
    """
    Creates the directory (and parents) if it does not exist yet.

    :path      String representing the directory path
    :return    The path
    """
    if path and not os.path.isdir(path):
        os.makedirs(path)
    return path


def dump_json(data, indent=None):
    """
    Serializes data the same way every time so output files can be compared
    byte for byte.

    :data      JSON-compatible object
    :indent    Optional indent for pretty printing
    :return    String
    """
    separators = (',', ': ') if indent else (',', ':')
    return json.dumps(data, indent=indent, sort_keys=True, separators=separators)
