import csv
import io
import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import aiofiles
import aiofiles.os
import numpy as np

from config import CODE_VERSION

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("experiment", "solver", "potential", "d", "Ns", "T", "trials", "mse", "se", "slope", "slope_se",
               "seed", "metric", "value", "version")


@dataclass
class ExperimentOutcome:
    """What a handler hands back: CSV rows, a results block and the invariant checks."""
    rows: List[Dict[str, Any]] = field(default_factory=list)
    results: Dict[str, Any] = field(default_factory=dict)
    checks: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check["pass"] for check in self.checks)


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def render_csv(rows: List[Dict[str, Any]], experiment: str, seed: int) -> str:
    """Rows in CSV_COLUMNS order; every row carries the experiment, master seed and code version."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        unknown = set(row) - set(CSV_COLUMNS)
        if unknown:
            raise ValueError(f"unknown CSV column(s): {', '.join(sorted(unknown))}")
        full = {"experiment": experiment, "seed": seed, "version": CODE_VERSION, **row}
        writer.writerow([format_cell(full.get(column)) for column in CSV_COLUMNS])
    return buffer.getvalue()


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else None
    return value


def build_summary(experiment: str, params: Dict[str, Any], outcome: ExperimentOutcome, runtime_s: float) -> Dict:
    return {
        "experiment": experiment,
        "params": _jsonable(params),
        "results": _jsonable(outcome.results),
        "checks": _jsonable(outcome.checks),
        "runtime_s": runtime_s,
    }


async def _ensure_parent(path: str):
    parent = os.path.dirname(path)
    if parent:
        await aiofiles.os.makedirs(parent, exist_ok=True)


async def write_csv(path: str, rows: List[Dict[str, Any]], experiment: str, seed: int):
    await _ensure_parent(path)
    async with aiofiles.open(path, "w", newline="") as file:
        await file.write(render_csv(rows, experiment, seed))
    logger.info(f"Wrote {len(rows)} rows to {path}")


async def write_json(path: str, summary: Dict[str, Any]):
    await _ensure_parent(path)
    async with aiofiles.open(path, "w") as file:
        await file.write(json.dumps(summary, indent=2, sort_keys=False) + "\n")
    logger.info(f"Wrote summary to {path}")


async def write_text(path: Optional[str], text: str):
    """Plain-text side artifact (chain listings)."""
    if not path:
        return
    await _ensure_parent(path)
    async with aiofiles.open(path, "w") as file:
        await file.write(text)
