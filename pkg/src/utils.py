import json
import logging
import os
from fractions import Fraction
from typing import Any, Dict, Mapping

import numpy as np

from .config import REPORT_SCHEMA_VERSION
from .errors import InputError


def ensure_dir(path: str) -> None:
    os.makedirs(path, exist_ok=True)


def setup_logging(verbose: bool = False) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def round_sig(x: float, digits: int = 12) -> float:
    return float(f"{x:.{digits}g}")


def jsonable(obj: Any) -> Any:
    """Convert report payloads to plain JSON: rationals as "p/q", floats to 12 significant digits."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round_sig(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return [round_sig(obj.real), round_sig(obj.imag)]
    if isinstance(obj, np.ndarray):
        return [jsonable(x) for x in obj.tolist()]
    if isinstance(obj, Mapping):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def build_report(payload: Mapping[str, Any], config: Mapping[str, Any]) -> Dict[str, Any]:
    report = {"schema_version": REPORT_SCHEMA_VERSION, "config": dict(config)}
    report.update(payload)
    return jsonable(report)


def dumps_report(report: Mapping[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


def load_json(path: str) -> Any:
    if not os.path.exists(path):
        raise InputError(f"input file not found at {path}")
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc
