import csv
import dataclasses
import io
import json
import logging
import math
import os
import tempfile

logger = logging.getLogger(__name__)

SCAN_FIELDS = ['N', 'r0', 'p', 'q', 'norm_p', 'norm_q', 'ratio_q_over_p', 'index_inner', 'index_annulus',
               'index_whole', 'quotient_annulus', 'residual']


def format_float(value: float) -> str:
    """17 significant digits; inf and nan spelled out"""
    if math.isnan(value):
        return 'nan'
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return f'{value:.17g}'


def _cell(value):
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        return format_float(value)
    return value


def _encode(value) -> str:
    if isinstance(value, float):
        text = format_float(value)
        return text if math.isfinite(value) else json.dumps(text)
    if isinstance(value, (list, tuple)):
        return '[' + ', '.join(_encode(v) for v in value) + ']'
    if isinstance(value, dict):
        return '{' + ', '.join(f'{json.dumps(str(k))}: {_encode(v)}' for k, v in value.items()) + '}'
    return json.dumps(value)


def as_record(row) -> dict:
    return dataclasses.asdict(row) if dataclasses.is_dataclass(row) else dict(row)


def to_csv(rows, fieldnames=None) -> str:
    records = [as_record(row) for row in rows]
    if fieldnames is None:
        fieldnames = list(records[0].keys()) if records else []
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fieldnames, extrasaction='ignore', lineterminator='\n')
    writer.writeheader()
    writer.writerows({k: _cell(v) for k, v in record.items()} for record in records)
    return buffer.getvalue()


def to_json(rows) -> str:
    """array of row objects, floats with 17 significant digits and non-finite values as strings"""
    records = [_encode(as_record(row)) for row in rows]
    return '[\n' + ',\n'.join(f'  {record}' for record in records) + ('\n]\n' if records else ']\n')


def render(rows, fmt: str, fieldnames=None) -> str:
    if fmt == 'json':
        return to_json(rows)
    if fmt == 'csv':
        return to_csv(rows, fieldnames)
    raise ValueError(f'unknown output format {fmt!r}')


def write_atomic(path: str, text: str):
    """writes next to the target and renames over it"""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix='.tmp-', suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, 'w', newline='', encoding='utf8') as f:
            f.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
    logger.info('wrote %s', path)
