"""Domain model and input file handling.

Three CSV inputs drive a run: indicator metadata (id, name, pillar,
direction), the state-by-indicator observation matrix, and an optional
table of per-state Gini coefficients. Loaders collect every problem they
find and raise a single InputError listing all of them, with 1-based row
numbers (the header is row 1).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import InputError

PILLARS: tuple[str, ...] = (
    "Health",
    "Education Access",
    "Education Quality and Equity",
    "Lifelong Learning",
    "Technology Access",
    "Work Opportunities",
    "Fair Wages",
    "Working Conditions",
    "Social Protection",
    "Inclusive Institutions",
)

INDICATORS_HEADER = ["indicator_id", "name", "pillar", "direction"]
GINI_HEADER = ["state", "gini"]


class Direction(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"

    @classmethod
    def parse(cls, text: str) -> "Direction":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown direction {text!r} (expected positive or negative)") from None


@dataclass(frozen=True)
class IndicatorSpec:
    """One indicator: machine id, human label, pillar membership, direction."""

    id: str
    name: str
    pillar: str
    direction: Direction


@dataclass(frozen=True)
class IndicatorRegistry:
    """Ordered indicator list; its order is the canonical column order downstream."""

    specs: tuple[IndicatorSpec, ...]

    def __post_init__(self):
        if not self.specs:
            raise InputError("indicator registry is empty")
        seen: dict[str, int] = {}
        problems = []
        for pos, spec in enumerate(self.specs):
            if not spec.id:
                problems.append(f"indicator at position {pos} has an empty id")
            if spec.id in seen:
                problems.append(f"duplicate indicator id {spec.id!r}")
            seen.setdefault(spec.id, pos)
            if spec.pillar not in PILLARS:
                problems.append(f"indicator {spec.id!r} has unknown pillar {spec.pillar!r}")
        if problems:
            raise InputError(problems)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.specs)

    @property
    def directions(self) -> tuple[Direction, ...]:
        return tuple(s.direction for s in self.specs)

    def __len__(self) -> int:
        return len(self.specs)

    def __iter__(self):
        return iter(self.specs)

    def __getitem__(self, i: int) -> IndicatorSpec:
        return self.specs[i]


@dataclass
class DataMatrix:
    """State-by-indicator observations, rows ordered as loaded."""

    states: tuple[str, ...]
    values: np.ndarray
    registry: IndicatorRegistry

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise InputError("observation values must be a 2-D matrix")
        n, p = self.values.shape
        if len(self.states) != n:
            raise InputError(f"{len(self.states)} state labels for {n} rows")
        if p != len(self.registry):
            raise InputError(f"{p} columns for a registry of {len(self.registry)} indicators")
        if len(self.registry) < 2:
            raise InputError("at least 2 indicators are required")
        if n < 2:
            raise InputError("at least 2 states are required")
        if not np.all(np.isfinite(self.values)):
            raise InputError("observation values must all be finite")

    @property
    def n_states(self) -> int:
        return self.values.shape[0]

    @property
    def n_indicators(self) -> int:
        return self.values.shape[1]


# state name -> Gini coefficient in [0, 1]
GiniTable = dict[str, float]


@dataclass(frozen=True)
class ColumnCheck:
    """Range summary for one indicator column."""

    indicator_id: str
    min: float
    max: float
    constant: bool


@dataclass
class ValidationReport:
    """Per-indicator range checks; constant columns are fatal for min-max scaling."""

    columns: list[ColumnCheck] = field(default_factory=list)

    @property
    def fatal_ids(self) -> list[str]:
        return [c.indicator_id for c in self.columns if c.constant]

    @property
    def ok(self) -> bool:
        return not self.fatal_ids


def _read_rows(path: str | Path) -> list[list[str]]:
    path = Path(path)
    if not path.exists():
        raise InputError(f"file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        return [row for row in csv.reader(fh)]


def load_indicator_metadata(path: str | Path) -> IndicatorRegistry:
    """Read indicators.csv (indicator_id,name,pillar,direction) into a registry."""
    rows = _read_rows(path)
    if not rows:
        raise InputError(f"{path}: file is empty")
    if [c.strip() for c in rows[0]] != INDICATORS_HEADER:
        raise InputError(f"{path}: header must be {','.join(INDICATORS_HEADER)!r}, got {','.join(rows[0])!r}")

    problems: list[str] = []
    specs: list[IndicatorSpec] = []
    first_row: dict[str, int] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 4:
            problems.append(f"row {lineno}: expected 4 fields, got {len(row)}")
            continue
        ind_id, name, pillar, direction_text = (c.strip() for c in row)
        if not ind_id:
            problems.append(f"row {lineno}: empty indicator id")
            continue
        if ind_id in first_row:
            problems.append(f"row {lineno}: duplicate indicator id {ind_id!r} (first seen at row {first_row[ind_id]})")
            continue
        first_row[ind_id] = lineno
        if pillar not in PILLARS:
            problems.append(f"row {lineno}: unknown pillar {pillar!r}")
            continue
        try:
            direction = Direction.parse(direction_text)
        except ValueError as exc:
            problems.append(f"row {lineno}: {exc}")
            continue
        specs.append(IndicatorSpec(id=ind_id, name=name, pillar=pillar, direction=direction))

    if problems:
        raise InputError(problems)
    if not specs:
        raise InputError(f"{path}: no indicator rows")
    return IndicatorRegistry(specs=tuple(specs))


def load_observations(path: str | Path, registry: IndicatorRegistry) -> DataMatrix:
    """Read observations.csv, whose header must be 'state' plus the registry ids in order."""
    if len(registry) < 2:
        raise InputError("at least 2 indicators are required to load observations")
    rows = _read_rows(path)
    if not rows:
        raise InputError(f"{path}: file is empty")

    header = [c.strip() for c in rows[0]]
    expected = ["state", *registry.ids]
    if header != expected:
        problems = []
        got_cols = set(header[1:]) if header and header[0] == "state" else set(header)
        missing = [i for i in registry.ids if i not in got_cols]
        extra = [c for c in header[1:] if c not in set(registry.ids)] if header and header[0] == "state" else header
        if header and header[0] != "state":
            problems.append(f"first header column must be 'state', got {header[0]!r}")
        if missing:
            problems.append(f"missing indicator columns: {', '.join(missing)}")
        if extra:
            problems.append(f"unexpected columns: {', '.join(extra)}")
        if not missing and not extra and header and header[0] == "state":
            problems.append("indicator columns are not in registry order")
        raise InputError([f"{path}: {p}" for p in problems])

    problems = []
    states: list[str] = []
    first_row: dict[str, int] = {}
    data: list[list[float]] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(expected):
            problems.append(f"row {lineno}: expected {len(expected)} fields, got {len(row)}")
            continue
        state = row[0].strip()
        if not state:
            problems.append(f"row {lineno}: empty state name")
            continue
        if state in first_row:
            problems.append(f"row {lineno}: duplicate state {state!r} (first seen at row {first_row[state]})")
            continue
        first_row[state] = lineno
        values = []
        bad = False
        for ind_id, cell in zip(registry.ids, row[1:]):
            try:
                v = float(cell)
            except ValueError:
                problems.append(f"row {lineno}: non-numeric value {cell!r} for ({state}, {ind_id})")
                bad = True
                continue
            if not math.isfinite(v):
                problems.append(f"row {lineno}: non-finite value {cell!r} for ({state}, {ind_id})")
                bad = True
                continue
            values.append(v)
        if not bad:
            states.append(state)
            data.append(values)

    if not problems and len(states) < 3:
        problems.append(f"{path}: found {len(states)} states, need at least 3")
    if problems:
        raise InputError(problems)
    return DataMatrix(states=tuple(states), values=np.array(data, dtype=np.float64), registry=registry)


def load_gini(path: str | Path) -> GiniTable:
    """Read gini.csv (state,gini) into a mapping; values must lie in [0, 1]."""
    rows = _read_rows(path)
    if not rows:
        raise InputError(f"{path}: file is empty")
    if [c.strip() for c in rows[0]] != GINI_HEADER:
        raise InputError(f"{path}: header must be 'state,gini', got {','.join(rows[0])!r}")

    problems: list[str] = []
    table: GiniTable = {}
    first_row: dict[str, int] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            problems.append(f"row {lineno}: expected 2 fields, got {len(row)}")
            continue
        state = row[0].strip()
        if not state:
            problems.append(f"row {lineno}: empty state name")
            continue
        if state in first_row:
            problems.append(f"row {lineno}: duplicate state {state!r} (first seen at row {first_row[state]})")
            continue
        first_row[state] = lineno
        try:
            value = float(row[1])
        except ValueError:
            problems.append(f"row {lineno}: non-numeric gini {row[1]!r} for {state}")
            continue
        if not (0.0 <= value <= 1.0):
            problems.append(f"row {lineno}: gini {value} for {state} outside [0, 1]")
            continue
        table[state] = value

    if problems:
        raise InputError(problems)
    return table


def validate_matrix(matrix: DataMatrix) -> ValidationReport:
    """Report per-indicator min/max; a constant column is fatal downstream."""
    checks = []
    for j, spec in enumerate(matrix.registry):
        col = matrix.values[:, j]
        lo = float(np.min(col))
        hi = float(np.max(col))
        checks.append(ColumnCheck(indicator_id=spec.id, min=lo, max=hi, constant=hi == lo))
    return ValidationReport(columns=checks)


def write_observations(matrix, path: str | Path, decimals: int | None = None) -> None:
    """Write a matrix (DataMatrix or NormalizedMatrix) back to observations.csv layout.

    decimals=None keeps full precision (repr round-trips floats exactly);
    an integer gives fixed-point presentation output.
    """
    fmt = repr if decimals is None else lambda v: f"{v:.{decimals}f}"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["state", *matrix.registry.ids])
        for state, row in zip(matrix.states, matrix.values):
            writer.writerow([state, *(fmt(float(v)) for v in row)])
