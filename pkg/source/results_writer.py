import csv
import io
import json
import math
from typing import Iterable, Optional, Sequence

from source.config import ExperimentConfig
from source.experiment_runner import FIELDNAMES, SlopeFit, VarianceRecord
from utils.errors import ConfigError

FORMATS = ("csv", "json")
SIGNIFICANT_DIGITS = 10


def format_float(x: float) -> str:
    """10 significant digits with a bare exponent, e.g. 6.172839506e-3"""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    mantissa, exponent = f"{x:.{SIGNIFICANT_DIGITS - 1}e}".split("e")
    return f"{mantissa}e{int(exponent)}"


def _cell(value):
    return format_float(value) if isinstance(value, float) else str(value)


def _json_number(value):
    if isinstance(value, float):
        return None if not math.isfinite(value) else float(format_float(value))
    return value


def records_to_csv(records: Iterable[VarianceRecord]) -> str:
    """Header row equal to FIELDNAMES, one row per record"""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FIELDNAMES)
    for record in records:
        writer.writerow([_cell(getattr(record, name)) for name in FIELDNAMES])
    return buf.getvalue()


def records_to_json(records: Iterable[VarianceRecord], config: Optional[ExperimentConfig] = None,
                    fits: Sequence[SlopeFit] = (), extra: Optional[dict] = None) -> str:
    doc = {
        "config": config.to_dict() if config is not None else None,
        "records": [{name: _json_number(getattr(r, name)) for name in FIELDNAMES} for r in records],
    }
    if fits:
        doc["fits"] = [{k: _json_number(v) for k, v in fit.to_dict().items()} for fit in fits]
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2) + "\n"


def render(records, fmt: str, config=None, fits=(), extra=None) -> str:
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}, got {fmt!r}")
    if fmt == "csv":
        return records_to_csv(records)
    return records_to_json(records, config, fits, extra)


def write_records(path: str, records, fmt: str, config=None, fits=(), extra=None) -> None:
    """Render and write to path as UTF-8"""
    text = render(records, fmt, config, fits, extra)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
