"""Grid sweeps, figure tables and large-N convergence studies.

Tables are plain column lists plus row tuples.  CSV output writes ``#``
provenance lines, a header row, then numbers with 17 significant digits.
JSON output is an array of objects with the same keys; non-finite numbers
(``omega_over_a`` at ``r = 0``, measures not requested) become ``null``.
Neither format embeds timestamps, so equal inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import BracketError, ConfigError, DomainError, VerificationError
from .measures import MEASURE_FIELDS, correlation_point, crossing_point
from .params import (
    AccelerationSpec,
    ModePoint,
    acceleration_from_squeezing,
    normalization_C,
    squeezing_from_acceleration,
    tail_bound,
)

BASE_COLUMNS = ("n_max", "r", "omega_over_a")
CSV_COLUMNS = BASE_COLUMNS + MEASURE_FIELDS
ORACLE_COLUMN = "oracle_maxdiff"
ORACLE_TOLERANCE = 1e-10
MAX_ORACLE_N = 8
DEFAULT_PROXY_N = 5000
THREADS_ENV = "RINDLER_CORR_THREADS"


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(THREADS_ENV, f"must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError(THREADS_ENV, f"must be a positive integer, got {raw!r}")
    return value


@dataclass
class Table:
    columns: tuple
    rows: list
    header: list = field(default_factory=list)

    def column(self, name) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([row[i] for row in self.rows], dtype=float)

    def records(self) -> list:
        return [dict(zip(self.columns, row)) for row in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        for line in self.header:
            buf.write(f"# {line}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        records = [{k: _json_value(v) for k, v in rec.items()} for rec in self.records()]
        return json.dumps(records, indent=1, allow_nan=False) + "\n"

    def write(self, path, fmt="csv"):
        text = self.to_csv() if fmt == "csv" else self.to_json()
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise ConfigError("output", f"cannot write {path}: {exc}") from exc


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def _json_value(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


# --------------------------------------------------------------------------
# sweep configuration


_CONFIG_KEYS = {
    "n_list", "r_min", "r_max", "steps", "r_values", "x_axis", "measures",
    "oracle_check", "max_oracle_n", "out", "format",
}


@dataclass(frozen=True)
class SweepConfig:
    """Validated sweep parameters.

    ``grid`` holds the x-axis values as given (``r`` or ``omega_over_a``, per
    ``x_axis``); ``r_values`` is the derived squeezing grid.
    """

    n_list: tuple
    grid: tuple
    x_axis: str = "r"
    measures: tuple = MEASURE_FIELDS
    oracle_check: bool = False
    max_oracle_n: int = 4
    out: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if not self.n_list:
            raise ConfigError("n_list", "must not be empty")
        for n in self.n_list:
            if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
                raise ConfigError("n_list", f"entries must be positive integers, got {n!r}")
        if self.x_axis not in ("r", "omega_over_a"):
            raise ConfigError("x_axis", f"must be 'r' or 'omega_over_a', got {self.x_axis!r}")
        grid = tuple(float(x) for x in self.grid)
        if not grid:
            raise ConfigError("r_grid", "must contain at least one point")
        if any(not math.isfinite(x) for x in grid):
            raise ConfigError("r_grid", "values must be finite")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("r_grid", "must be strictly increasing")
        lower = 0.0 if self.x_axis == "r" else 0.0
        if grid[0] < lower or (self.x_axis == "omega_over_a" and grid[0] <= 0):
            raise ConfigError("r_grid", f"values out of range for x_axis={self.x_axis}")
        object.__setattr__(self, "grid", grid)
        unknown = set(self.measures) - set(MEASURE_FIELDS)
        if unknown or not self.measures:
            raise ConfigError("measures", f"unknown or empty: {sorted(unknown)}")
        object.__setattr__(self, "measures", tuple(m for m in MEASURE_FIELDS if m in self.measures))
        if self.oracle_check and not 1 <= self.max_oracle_n <= MAX_ORACLE_N:
            raise ConfigError("max_oracle_n", f"must lie in 1..{MAX_ORACLE_N}")
        if self.format not in ("csv", "json"):
            raise ConfigError("format", f"must be 'csv' or 'json', got {self.format!r}")

    @property
    def r_values(self) -> tuple:
        if self.x_axis == "r":
            return self.grid
        return tuple(squeezing_from_acceleration(AccelerationSpec(x)) for x in self.grid)

    @classmethod
    def from_mapping(cls, data: dict) -> "SweepConfig":
        """Build from flat key-value data (a JSON config file or CLI flags)."""
        unknown = set(data) - _CONFIG_KEYS
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown config key")
        n_list = data.get("n_list")
        if isinstance(n_list, (int, np.integer)):
            n_list = [n_list]
        if n_list is None:
            raise ConfigError("n_list", "is required")
        grid = data.get("r_values")
        if grid is None:
            grid = make_grid(data.get("r_min"), data.get("r_max"), data.get("steps"))
        elif any(k in data for k in ("r_min", "r_max", "steps")):
            raise ConfigError("r_values", "give either r_values or r_min/r_max/steps")
        measures = data.get("measures") or MEASURE_FIELDS
        if isinstance(measures, str):
            measures = [m.strip() for m in measures.split(",") if m.strip()]
        return cls(
            n_list=tuple(n_list),
            grid=tuple(grid),
            x_axis=data.get("x_axis", "r"),
            measures=tuple(measures),
            oracle_check=bool(data.get("oracle_check", False)),
            max_oracle_n=int(data.get("max_oracle_n", 4)),
            out=data.get("out"),
            format=data.get("format", "csv"),
        )

    def provenance(self) -> list:
        return [
            f"rindler_corr {__version__} sweep",
            f"n_list={list(self.n_list)}",
            f"x_axis={self.x_axis} points={len(self.grid)} min={_fmt(self.grid[0])} max={_fmt(self.grid[-1])}",
            f"oracle_check={str(self.oracle_check).lower()} max_oracle_n={self.max_oracle_n}",
        ]


def make_grid(lo, hi, steps) -> tuple:
    """``steps`` evenly spaced points on ``[lo, hi]``; ``steps == 1`` needs ``lo == hi``."""
    for name, v in (("r_min", lo), ("r_max", hi), ("steps", steps)):
        if v is None:
            raise ConfigError(name, "is required")
    lo, hi = float(lo), float(hi)
    if isinstance(steps, float) and not steps.is_integer():
        raise ConfigError("steps", f"must be an integer, got {steps}")
    steps = int(steps)
    if steps == 1:
        if lo != hi:
            raise ConfigError("steps", "a single step requires r_min == r_max")
        return (lo,)
    if steps < 2:
        raise ConfigError("steps", f"must be >= 2, got {steps}")
    if not hi > lo:
        raise ConfigError("r_max", f"must exceed r_min ({lo})")
    return tuple(float(x) for x in np.linspace(lo, hi, steps))


# --------------------------------------------------------------------------
# sweeps


def _evaluate(args):
    n, r, measures, oracle_n = args
    p = ModePoint(n, r)
    point = correlation_point(p, measures).as_dict()
    row = [n, r, acceleration_from_squeezing(r)] + [point[m] for m in measures]
    if oracle_n is not None:
        if n <= oracle_n:
            from .verify import verify_point

            row.append(verify_point(p).max_discrepancy)
        else:
            row.append(None)
    return tuple(row)


def run_sweep(cfg: SweepConfig, threads: int | None = None) -> Table:
    """One row per ``(N, r)``, N outer, r inner; order independent of threading."""
    threads = default_threads() if threads is None else threads
    oracle_n = cfg.max_oracle_n if cfg.oracle_check else None
    tasks = [(n, r, cfg.measures, oracle_n) for n in cfg.n_list for r in cfg.r_values]
    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_evaluate, tasks))
    else:
        rows = [_evaluate(t) for t in tasks]
    columns = BASE_COLUMNS + cfg.measures + ((ORACLE_COLUMN,) if cfg.oracle_check else ())
    table = Table(columns, rows, cfg.provenance())
    if cfg.out:
        table.write(cfg.out, cfg.format)
    return table


def oracle_failures(table: Table, tolerance: float = ORACLE_TOLERANCE) -> list:
    """Rows whose oracle discrepancy column is at or above ``tolerance``."""
    if ORACLE_COLUMN not in table.columns:
        return []
    i = table.columns.index(ORACLE_COLUMN)
    return [row for row in table.rows if row[i] is not None and not row[i] < tolerance]


# --------------------------------------------------------------------------
# figure recipes

FIGURE_SCHEMAS = {
    "ar_bundle": ("n_max", "r", "omega_over_a", "neg_AR"),
    "ar_crossings": ("n_max", "r", "omega_over_a", "neg_AR", "tail_bound"),
    "rc_vs_n": ("n1", "n2", "r_c", "omega_over_a_c"),
    "rrbar_negativity": ("n_max", "r", "omega_over_a", "neg_RRbar"),
    "mutual_conservation": ("n_max", "r", "omega_over_a", "I_AR", "I_ARbar", "I_sum", "tail_bound"),
    "conservation_deviation": ("n_max", "r", "omega_over_a", "deviation", "tail_bound"),
    "rrbar_mutual": ("n_max", "r", "omega_over_a", "I_RRbar"),
}

FIGURE_DEFAULTS = {
    "ar_bundle": {"n_list": (1, 2, 3, 4, 5, 6, 8, 10, 15, 20, 50, 100), "r_min": 0.0, "r_max": 3.0, "steps": 301},
    "ar_crossings": {"n_list": (1, 2, 15), "proxy_n": DEFAULT_PROXY_N, "r_min": 0.0, "r_max": 3.0, "steps": 301},
    "rc_vs_n": {"n1": 1, "n_max": 30, "r_lo": 1e-3, "r_hi": 10.0},
    "rrbar_negativity": {"n_list": (1, 2, 4), "r_min": 0.0, "r_max": 10.0, "steps": 201},
    "mutual_conservation": {
        "n_list": (1, 10, 100, 1000), "proxy_n": DEFAULT_PROXY_N, "r_min": 0.0, "r_max": 8.0, "steps": 321,
    },
    "conservation_deviation": {
        "n_list": (1, 10, 100, 1000, 10000), "proxy_n": None, "r_min": 0.0, "r_max": 8.0, "steps": 321,
    },
    "rrbar_mutual": {"n_list": (1, 2, 4, 10, 100), "r_min": 0.0, "r_max": 10.0, "steps": 201},
}

_FIGURE_MEASURES = {
    "ar_bundle": ("neg_AR",),
    "ar_crossings": ("neg_AR",),
    "rrbar_negativity": ("neg_RRbar",),
    "mutual_conservation": ("I_AR", "I_ARbar"),
    "conservation_deviation": ("deviation",),
    "rrbar_mutual": ("I_RRbar",),
}


@dataclass(frozen=True)
class FigureRecipe:
    """A figure id plus parameter overrides for :data:`FIGURE_DEFAULTS`."""

    figure_id: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.figure_id not in FIGURE_SCHEMAS:
            raise ConfigError("figure_id", f"unknown figure {self.figure_id!r}; known: {sorted(FIGURE_SCHEMAS)}")
        allowed = set(FIGURE_DEFAULTS[self.figure_id])
        extra = set(self.params) - allowed
        if extra:
            raise ConfigError(sorted(extra)[0], f"not a parameter of {self.figure_id}; allowed {sorted(allowed)}")

    def resolved(self) -> dict:
        out = dict(FIGURE_DEFAULTS[self.figure_id])
        out.update({k: v for k, v in self.params.items() if v is not None})
        return out


def figure_data(recipe: FigureRecipe, threads: int | None = None) -> Table:
    """Table with exactly the :data:`FIGURE_SCHEMAS` columns of ``recipe.figure_id``."""
    fid = recipe.figure_id
    prm = recipe.resolved()
    header = [f"rindler_corr {__version__} figure={fid}"]
    header += [f"{k}={list(v) if isinstance(v, tuple) else v}" for k, v in sorted(prm.items())]
    columns = FIGURE_SCHEMAS[fid]
    if fid == "rc_vs_n":
        n1 = int(prm["n1"])
        rows = []
        for n2 in range(n1 + 1, int(prm["n_max"]) + 1):
            rc = crossing_point(n1, n2, (prm["r_lo"], prm["r_hi"]))
            rows.append((n1, n2, rc, acceleration_from_squeezing(rc)))
        return Table(columns, rows, header)

    n_list = list(prm["n_list"])
    if prm.get("proxy_n"):
        n_list.append(int(prm["proxy_n"]))
    grid = make_grid(prm["r_min"], prm["r_max"], prm["steps"])
    cfg = SweepConfig(n_list=tuple(n_list), grid=grid, measures=_FIGURE_MEASURES[fid])
    sweep = run_sweep(cfg, threads)
    rows = []
    for rec in sweep.records():
        rec["tail_bound"] = tail_bound(ModePoint(rec["n_max"], rec["r"]))
        if fid == "mutual_conservation":
            rec["I_sum"] = rec["I_AR"] + rec["I_ARbar"]
        rows.append(tuple(rec[c] for c in columns))
    return Table(columns, rows, header)


# --------------------------------------------------------------------------
# limit study

LIMIT_COLUMNS = (
    "n_max", "C_N", "C_error", "C_bound", "neg_AR", "neg_ARbar", "S_A", "I_AR", "I_ARbar", "I_RRbar", "deviation",
)
LIMIT_MEASURES = ("neg_AR", "neg_ARbar", "S_A", "I_AR", "I_ARbar", "I_RRbar", "deviation")


@dataclass
class LimitReport:
    """Measures versus N at fixed r, with successive (Cauchy) differences.

    ``ordering`` records how ``neg_AR`` is ordered in N relative to the AR
    crossing points between consecutive entries of the sequence:
    ``"decreasing"`` when ``r`` lies left of all of them, ``"increasing"``
    when right of all, ``None`` when in between.
    """

    r: float
    table: Table
    cauchy: dict
    crossings: dict
    ordering: str | None
    ordering_holds: bool


def limit_study(r: float, n_sequence, crossing_bracket=(1e-3, 15.0)) -> LimitReport:
    """Convergence of each measure toward the unbounded-N limit at fixed ``r``.

    Raises :class:`VerificationError` if ``neg_AR`` violates the ordering
    implied by the detected crossing points.
    """
    seq = [int(n) for n in n_sequence]
    if not seq or any(b <= a for a, b in zip(seq, seq[1:])):
        raise DomainError(f"n_sequence must be strictly increasing, got {seq}")
    rows = []
    for n in seq:
        p = ModePoint(n, r)
        pt = correlation_point(p, LIMIT_MEASURES).as_dict()
        c = normalization_C(p)
        rows.append((n, c, abs(c - math.sqrt(2.0)), tail_bound(p)) + tuple(pt[m] for m in LIMIT_MEASURES))
    table = Table(LIMIT_COLUMNS, rows, [f"rindler_corr {__version__} limit r={_fmt(r)} n_sequence={seq}"])
    cauchy = {m: np.diff(table.column(m)).tolist() for m in ("C_N",) + LIMIT_MEASURES}

    crossings = {}
    for a, b in zip(seq, seq[1:]):
        try:
            crossings[(a, b)] = crossing_point(a, b, crossing_bracket)
        except BracketError:
            crossings[(a, b)] = None
    found = [v for v in crossings.values() if v is not None]
    ordering, holds = None, True
    neg = table.column("neg_AR")
    if len(seq) > 1 and len(found) == len(crossings) and r > 0:
        if r < min(found):
            ordering = "decreasing"
            holds = bool(np.all(np.diff(neg) < 0))
        elif r > max(found):
            ordering = "increasing"
            holds = bool(np.all(np.diff(neg) > 0))
    report = LimitReport(float(r), table, cauchy, crossings, ordering, holds)
    if not holds:
        raise VerificationError(f"neg_AR is not {ordering} in N at r={r}: {neg.tolist()}")
    return report
