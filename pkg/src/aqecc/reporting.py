"""Power-law fits and deterministic CSV/JSON emission."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from scipy import stats

from .errors import DataError, RangeError

SCHEMA_VERSION = "aqecc/1"


def fit_power_law(points: Iterable[Tuple[float, float]]):
    """Least squares of log(value) on log(N); returns (slope, intercept, r_squared)."""
    pts = [(float(n), float(v)) for n, v in points]
    if len(pts) < 3:
        raise DataError(f"need at least 3 points, got {len(pts)}")
    if any(n <= 0 or v <= 0 for n, v in pts):
        raise DataError("power-law fit needs positive N and values")
    x = np.log([n for n, _ in pts])
    y = np.log([v for _, v in pts])
    if np.ptp(y) == 0.0:
        # linregress reports r = 0 on a flat line; an exact constant is a perfect fit
        return 0.0, float(y[0]), 1.0
    res = stats.linregress(x, y)
    return float(res.slope), float(res.intercept), float(res.rvalue**2)


def parse_grid(text: str) -> List[int]:
    """``lo:hi:x2`` doubles from lo up to hi; ``lo:hi:+s`` steps by s. Both ends inclusive."""
    try:
        lo_s, hi_s, step = text.split(":")
        lo, hi = int(lo_s), int(hi_s)
        amount = int(step[1:])
    except ValueError:
        raise RangeError(f"bad grid {text!r}; expected lo:hi:xF or lo:hi:+S") from None
    if lo < 1 or hi < lo or amount < 1 or step[0] not in "x+" or (step[0] == "x" and amount < 2):
        raise RangeError(f"bad grid {text!r}")
    out, n = [], lo
    while n <= hi:
        out.append(n)
        n = n * amount if step[0] == "x" else n + amount
    return out


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def dumps(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def config_hash(config: dict) -> str:
    return hashlib.sha256(json.dumps(_plain(config), sort_keys=True).encode()).hexdigest()[:16]


def format_value(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    return str(x)


class OutputDir:
    """Writes every file of one run, stamped with the schema version and config hash."""

    def __init__(self, root, config: dict):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.config = config
        self.hash = config_hash(config)
        self.written: List[Path] = []

    def json(self, name: str, payload: dict) -> Path:
        body = dict(_plain(payload))
        body["schema_version"] = SCHEMA_VERSION
        body["config_hash"] = self.hash
        return self._write(name, dumps(body))

    def csv(self, name: str, columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
        buf = io.StringIO()
        buf.write(f"# schema {SCHEMA_VERSION}; config-hash {self.hash}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
        return self._write(name, buf.getvalue())

    def write_config(self) -> Path:
        return self.json("config.json", {"config": self.config})

    def _write(self, name, text) -> Path:
        path = self.root / name
        path.write_text(text, encoding="utf-8")
        self.written.append(path)
        return path


def read_csv(path) -> Tuple[List[str], List[List[str]]]:
    """Header and rows of a CSV written by :class:`OutputDir` (comment line skipped)."""
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]
