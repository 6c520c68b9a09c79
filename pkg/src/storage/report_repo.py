"""
Report Repository
JSON and CSV report files. JSON writing converts numpy scalars/arrays and
dataclasses so reports can embed predictions and configs directly.
"""

import dataclasses
import json
import logging
import os
from enum import Enum
from typing import Any, Dict

import numpy as np
import pandas as pd

from src.errors import IoError, ParseError

logger = logging.getLogger(__name__)


def _to_jsonable(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Enum):
        return value.value
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return dataclasses.asdict(value)
    if isinstance(value, pd.DataFrame):
        return value.to_dict(orient="records")
    if isinstance(value, (set, tuple)):
        return list(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def write_json_report(report: Dict, path: str) -> str:
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2, default=_to_jsonable, ensure_ascii=False)
    logger.info("📝 Report written: %s", path)
    return path


def read_json_report(path: str) -> Dict:
    if not os.path.isfile(path):
        raise IoError(f"report not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid report JSON: {exc.msg}", line=exc.lineno) from exc


def write_csv_report(table: pd.DataFrame, path: str) -> str:
    _ensure_parent(path)
    table.to_csv(path, index=False)
    logger.info("📝 Table written: %s", path)
    return path
