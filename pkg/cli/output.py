"""CSV / JSON writers and GridField file I/O for the command line."""
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from config import settings
from mechanics.exceptions import InadmissibleFieldError
from mechanics.model import GridField

logger = logging.getLogger(__name__)

FIELD_COLUMNS = ("x", "u", "alpha")


@dataclass
class Table:
    columns: list
    rows: list


def format_value(value) -> str:
    """Fixed CSV formatting: floats at CSV_SIGNIFICANT_DIGITS significant digits."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        text = f"{float(value):.{settings.CSV_SIGNIFICANT_DIGITS}g}"
        return "0" if text == "-0" else text
    if isinstance(value, (list, tuple)):
        return ";".join(format_value(v) for v in value)
    return str(value)


def _plain(value):
    """numpy scalars and tuples to JSON-native types."""
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return _plain(float(value))
    if isinstance(value, float) and math.isnan(value):
        return None
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def render_csv(payload) -> str:
    if isinstance(payload, dict):
        payload = Table(list(payload), [list(payload.values())])
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(payload.columns)
    for row in payload.rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def render_json(payload) -> str:
    if isinstance(payload, Table):
        payload = [dict(zip(payload.columns, row)) for row in payload.rows]
    return json.dumps(_plain(payload), indent=2) + "\n"


def emit(payload, fmt: str, out: str = None) -> None:
    """Write a Table or a dict as csv or json to ``out`` (stdout when None)."""
    text = render_csv(payload) if fmt == "csv" else render_json(payload)
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")
    logger.info("wrote %s", path)


def write_field(path, field: GridField) -> None:
    """Dump a field as x,u,alpha with full precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(FIELD_COLUMNS)
        for row in zip(field.x, field.u, field.alpha):
            writer.writerow([repr(float(v)) for v in row])
    logger.info("wrote field %s", path)


def read_field(path) -> GridField:
    path = Path(path)
    try:
        with path.open(encoding="utf-8", newline="") as handle:
            reader = csv.DictReader(handle)
            missing = set(FIELD_COLUMNS[1:]) - set(reader.fieldnames or ())
            if missing:
                raise InadmissibleFieldError(f"{path}: missing columns {', '.join(sorted(missing))}")
            rows = [(float(r["u"]), float(r["alpha"])) for r in reader]
    except InadmissibleFieldError:
        raise
    except OSError as exc:
        raise InadmissibleFieldError(f"{path}: {exc.strerror or exc}") from exc
    except (TypeError, ValueError) as exc:
        # short rows give None cells
        raise InadmissibleFieldError(f"{path}: non-numeric cell ({exc})") from exc
    if not rows:
        raise InadmissibleFieldError(f"{path}: no data rows")
    u, alpha = zip(*rows)
    return GridField(np.asarray(u), np.asarray(alpha))
