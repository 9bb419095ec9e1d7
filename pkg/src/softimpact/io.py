"""Deterministic artifact writers: CSV (17 significant digits), JSON, manifests."""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path


def fmt(value) -> str:
    """Render one CSV cell; floats use 17 significant digits."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    return str(value)


def write_csv(path: Path, header: list[str], rows) -> None:
    """Write rows with '\\n' line endings and deterministic float formatting."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")


def sha256_of(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def orbit_record(orbit) -> dict:
    """JSON-ready record of a periodic orbit."""
    return {
        "epsilon": orbit.epsilon,
        "u10": orbit.u10,
        "v20": orbit.v20,
        "H": orbit.h,
        "t_c": orbit.t_c,
        "monodromy": [[float(x) for x in row] for row in orbit.monodromy],
        "multipliers": [[m.real, m.imag] for m in orbit.multipliers],
        "stability": orbit.stability.value,
    }
