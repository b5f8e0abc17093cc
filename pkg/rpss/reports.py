"""
Report emitters shared by the management commands: JSON, aligned text
tables and CSV.
"""
import csv
import io
import json
import math

import numpy as np


def _clean(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def to_json(payload):
    """JSON text; NaN and infinities become null."""
    return json.dumps(_clean(payload), indent=2, sort_keys=False)


def _format_cell(value):
    if value is None:
        return '-'
    if isinstance(value, bool):
        return 'yes' if value else ''
    if isinstance(value, float):
        if math.isnan(value):
            return 'nan'
        if value != 0.0 and (abs(value) < 1e-3 or abs(value) >= 1e7):
            return f"{value:.4e}"
        return f"{value:.6f}".rstrip('0').rstrip('.') if value % 1 else f"{value:.1f}"
    return str(value)


def text_table(headers, rows):
    """Aligned plain-text table, numbers right-justified."""
    cells = [[_format_cell(v) for v in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in cells:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = [
        '  '.join(h.rjust(w) for h, w in zip(headers, widths)),
        '  '.join('-' * w for w in widths),
    ]
    for row in cells:
        lines.append('  '.join(cell.rjust(w) for cell, w in zip(row, widths)))
    return '\n'.join(lines) + '\n'


def to_csv(headers, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(headers)
    for row in rows:
        writer.writerow(['' if v is None else v for v in row])
    return buffer.getvalue()


def histogram_csv(counts, label='symbol'):
    """`<label>,count` with one row per symbol, zero counts included."""
    return to_csv((label, 'count'), enumerate(counts))


def sparse_histogram_csv(values, label):
    """Histogram of raw values, only observed values listed."""
    observed, counts = np.unique(np.asarray(values, dtype=np.int64), return_counts=True)
    return to_csv((label, 'count'), zip(observed.tolist(), counts.tolist()))


def stats_report_text(report):
    data = report.as_dict()
    data.pop('histogram')
    width = max(len(k) for k in data)
    lines = [f"{key.ljust(width)}  {_format_cell(value)}" for key, value in data.items()]
    return '\n'.join(lines) + '\n'
