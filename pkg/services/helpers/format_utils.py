import json
import math
from enum import Enum
from typing import Any

from core.schemas import MetricStatus


def round_sig(value: float, digits: int = 6) -> float:
    """Round to `digits` significant digits."""
    if value == 0 or not math.isfinite(value):
        return value
    return float(f"{value:.{digits}g}")


def report_value(obj: Any, digits: int = 6) -> Any:
    """Walk a JSON-ready structure and round every float."""
    if isinstance(obj, bool) or isinstance(obj, int) or obj is None:
        return obj
    if isinstance(obj, float):
        return round_sig(obj, digits)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {key: report_value(val, digits) for key, val in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [report_value(val, digits) for val in obj]
    return obj


def dump_json(payload: Any, digits: int = 6) -> str:
    """Byte-stable JSON: field order kept, floats at fixed significant digits."""
    return json.dumps(report_value(payload, digits), indent=2, ensure_ascii=False) + "\n"


def fmt_metric(value: Any) -> str:
    """Format value for a text table."""
    if isinstance(value, MetricStatus):
        return value.value
    if isinstance(value, str):
        return value
    if isinstance(value, int) or (isinstance(value, float) and value.is_integer() and abs(value) >= 1000):
        return f"{int(value):d}"
    return f"{value:.3f}"


def delta_str(value: Any) -> str:
    if isinstance(value, MetricStatus):
        return value.value
    return f"{value:+.3f}"
