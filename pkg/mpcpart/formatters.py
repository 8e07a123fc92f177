import io
import csv

from .utils import dump_json

TABLE = 'table'
JSON = 'json'
CSV = 'csv'
FORMATS = (TABLE, JSON, CSV)


def format(result, style=TABLE):
    """
    Formats the result of a command into a string.

    :result    object
    :style     One of FORMATS; csv only applies to lists of rows
    :return    String
    """
    if style == JSON:
        return dump_json(result, 2)
    if isinstance(result, list):
        # Lists are assumed to be rows of dictionaries sharing their keys.
        if len(result) == 0:
            return 'No results found.'
        keys = list(result[0].keys())
        if style == CSV:
            return format_as_csv(result, keys)
        return format_as_table(result, keys, keys)
    elif isinstance(result, dict):
        return format_as(result)
    elif isinstance(result, bool):
        return 'Success' if result else 'Failed'
    else:
        return result


def format_cell(value):
    if isinstance(value, float):
        return '%.6g' % value
    if isinstance(value, (list, tuple)):
        return ','.join(format_cell(v) for v in value)
    if value is None:
        return '-'
    return str(value)


def format_as(data):
    """
    Formats a dictionary into newline separated sections; scalar values go
    on one line, lists of rows become tables.

    :data      Dictionary of data to print
    """
    scalars, sections = [], []
    for key, value in data.items():
        title = key.replace('_', ' ').title()
        if isinstance(value, list) and value and isinstance(value[0], dict):
            columns = list(value[0].keys())
            sections.append('%s:\n%s' % (title, format_as_table(value, columns, columns)))
        elif isinstance(value, list) and not value:
            sections.append('%s:\n(none)' % title)
        else:
            scalars.append('%s: %s' % (title, format_cell(value)))
    return '\n\n'.join(['\n'.join(scalars)] + sections if scalars else sections)


def format_as_table(data, keys, header=None):
    """
    Takes a list of dictionaries and returns the data as a fixed-width
    text table.

    :data      List of dictionaries
    :keys      Keys to show, in column order
    :header    Optional column titles
    """
    rows = [dict((key, format_cell(row.get(key))) for key in keys) for row in data]

    if header:
        # Header row followed by a divider as wide as each title.
        rows.insert(0, dict(zip(keys, ('-' * len(name) for name in header))))
        rows.insert(0, dict(zip(keys, header)))

    widths = [max(len(row[key]) for row in rows) for key in keys]
    template = ('%-*s   ' * len(keys)).strip()
    lines = []
    for row in rows:
        cells = []
        for key, width in zip(keys, widths):
            cells.extend((width, row[key]))
        lines.append((template % tuple(cells)).rstrip())
    return '\n'.join(lines)


def format_as_csv(data, keys):
    """Rows as CSV with a header line; values are written unrounded."""
    output = io.StringIO()
    writer = csv.DictWriter(output, fieldnames=keys, extrasaction='ignore', lineterminator='\n')
    writer.writeheader()
    writer.writerows(data)
    return output.getvalue()
