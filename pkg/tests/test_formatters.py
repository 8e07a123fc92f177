from mpcpart.formatters import CSV, JSON, format, format_as, format_as_csv, format_as_table


def test_table_pads_columns_under_the_header():
    rows = [{'id': 0, 'wcrt_ms': 1.5}, {'id': 12, 'wcrt_ms': 4.0}]
    assert format_as_table(rows, ['id', 'wcrt_ms'], ['id', 'wcrt_ms']).split('\n') == [
        'id   wcrt_ms',
        '--   -------',
        '0    1.5',
        '12   4',
    ]


def test_report_puts_scalars_before_row_sections():
    text = format_as({'cores': 2, 'verdict': 'schedulable', 'tasks': [{'id': 0}], 'unassigned': []})
    assert text == 'Cores: 2\nVerdict: schedulable\n\nTasks:\nid\n--\n0\n\nUnassigned:\n(none)'


def test_rows_as_csv_and_json():
    rows = [{'algorithm': 'brwfd', 'value': 0.25}]
    assert format(rows, CSV) == format_as_csv(rows, ['algorithm', 'value']) == 'algorithm,value\nbrwfd,0.25\n'
    assert format([], CSV) == 'No results found.'
    assert '"algorithm": "brwfd"' in format(rows, JSON)
