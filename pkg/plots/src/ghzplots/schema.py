"""Reader for the schema=1 CSV files written by the ghzfreq CLI.

Layout: a ``# schema=1`` line, a ``# config=<json>`` line, a header row,
numeric data rows, and optional ``# fit <name> key=value ...`` footer
lines carrying fitted power laws.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SCHEMA_LINE = "# schema=1"


class SchemaError(Exception):
    """The file does not follow the schema=1 table layout."""


@dataclass(frozen=True)
class FitRecord:
    """One fitted power law from a footer line (None values if skipped)."""

    name: str
    exponent: float
    intercept: float
    r_squared: float
    n_min: float
    n_max: float


@dataclass(frozen=True)
class Table:
    """Parsed CSV: config dict, column names, data matrix, fit footers."""

    config: dict
    columns: list
    data: np.ndarray
    fits: dict
    skipped_fits: set

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise SchemaError(f"missing column {name!r}; file has "
                              f"{self.columns}")
        return self.data[:, self.columns.index(name)]


def _parse_fit_line(line: str):
    # "# fit <name> exponent=.. intercept=.. r_squared=.. n_min=.. n_max=.."
    parts = line.split()
    name = parts[2]
    fields = dict(p.split("=", 1) for p in parts[3:])
    if "skipped" in fields:
        return name, None
    try:
        return name, FitRecord(name=name,
                               exponent=float(fields["exponent"]),
                               intercept=float(fields["intercept"]),
                               r_squared=float(fields["r_squared"]),
                               n_min=float(fields["n_min"]),
                               n_max=float(fields["n_max"]))
    except (KeyError, ValueError) as exc:
        raise SchemaError(f"malformed fit footer: {line!r}") from exc


def read_table(path) -> Table:
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"no such file: {path}")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != SCHEMA_LINE:
        raise SchemaError(f"{path}: first line must be '{SCHEMA_LINE}'")
    if len(lines) < 2 or not lines[1].startswith("# config="):
        raise SchemaError(f"{path}: second line must carry '# config='")
    try:
        config = json.loads(lines[1][len("# config="):])
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: config line is not valid JSON") from exc

    fits: dict = {}
    skipped: set = set()
    body = []
    for line in lines[2:]:
        if line.startswith("# fit "):
            name, record = _parse_fit_line(line)
            if record is None:
                skipped.add(name)
            else:
                fits[name] = record
        elif line.startswith("#") or not line.strip():
            continue
        else:
            body.append(line)
    if not body:
        raise SchemaError(f"{path}: no header row")
    columns = body[0].split(",")
    rows = []
    for line in body[1:]:
        cells = line.split(",")
        if len(cells) != len(columns):
            raise SchemaError(f"{path}: row width {len(cells)} != "
                              f"header width {len(columns)}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            # non-numeric cells (e.g. objective labels) become NaN
            rows.append([_float_or_nan(c) for c in cells])
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return Table(config=config, columns=columns,
                 data=np.array(rows, dtype=float), fits=fits,
                 skipped_fits=skipped)


def _float_or_nan(cell: str) -> float:
    try:
        return float(cell)
    except ValueError:
        return float("nan")
