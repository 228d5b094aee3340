"""Experiment configuration, result tables and their CSV/JSON emitters."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .exponent import build_exponent, lerner_grid
from .grid import Grid, make_grid, uniform_grid

__all__ = [
    "ConfigError", "GridSpec", "ExperimentConfig", "ResultTable", "emit",
    "parse_json", "parse_csv", "run_experiment", "load_config", "version",
]


def version() -> str:
    from importlib.metadata import PackageNotFoundError, version as _v
    try:
        return _v("artifact")
    except PackageNotFoundError:  # running from a source tree
        return "0.1.0"


class ConfigError(ValueError):
    """Invalid experiment configuration; ``errors`` lists ``(field, message)``."""

    def __init__(self, errors):
        self.errors = [(str(f), str(m)) for f, m in errors]
        super().__init__("; ".join(f"{f}: {m}" for f, m in self.errors))


class GridSpec(BaseModel):
    """Grid description: uniform box, explicit edges, or the Lerner grid."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["uniform", "explicit", "lerner"] = "uniform"
    lo: float | list[float] = -8.0
    hi: float | list[float] = 8.0
    cells: int | list[int] = 128
    boundaries: list[list[float]] | None = None
    k_max: int = Field(3, ge=1, le=4)
    h: float = Field(0.125, gt=0)
    per_efold: int = Field(8, ge=1)

    def build(self, refine: int = 1) -> Grid:
        if self.kind == "lerner":
            return lerner_grid(self.k_max, self.h / refine, self.per_efold * refine)
        if self.kind == "explicit":
            if self.boundaries is None:
                raise ValueError("explicit grids need boundaries")
            if refine != 1:
                raise ValueError("explicit grids cannot be refined")
            return make_grid(len(self.boundaries), self.boundaries)
        if isinstance(self.cells, list):
            return uniform_grid(tuple(self.lo), tuple(self.hi), tuple(c * refine for c in self.cells))
        return uniform_grid(self.lo, self.hi, self.cells * refine)


class ExperimentConfig(BaseModel):
    """Validated input of :func:`run_experiment`.

    ``params`` holds experiment-specific settings; they are checked against
    the experiment's own schema before anything runs.
    """

    model_config = ConfigDict(extra="forbid")

    experiment: str
    grid: GridSpec = Field(default_factory=GridSpec)
    exponent: dict[str, Any] = Field(default_factory=lambda: {"kind": "constant", "q": 2.0})
    params: dict[str, Any] = Field(default_factory=dict)
    budget: int = Field(1000, ge=1)
    seed: int = Field(0, ge=0)
    output: str | None = None

    @field_validator("experiment")
    @classmethod
    def _known(cls, v):
        from .experiments import EXPERIMENTS
        if v not in EXPERIMENTS:
            raise ValueError(f"unknown experiment id {v!r}; known: {sorted(EXPERIMENTS)}")
        return v

    @field_validator("exponent")
    @classmethod
    def _has_kind(cls, v):
        if "kind" not in v:
            raise ValueError("exponent spec needs a 'kind'")
        return v

    def build_grid(self, refine: int = 1) -> Grid:
        return self.grid.build(refine)

    def build_exponent(self, grid: Grid, spec: dict | None = None):
        return build_exponent(grid, spec or self.exponent)


def _field(loc) -> str:
    return ".".join(str(x) for x in loc) or "<root>"


def make_config(data: dict, seed: int | None = None) -> ExperimentConfig:
    """Validate a raw config dict (experiment defaults are filled in first)."""
    from .experiments import EXPERIMENTS

    if not isinstance(data, dict):
        raise ConfigError([("<root>", "config must be a JSON object")])
    exp = data.get("experiment")
    merged = dict(data)
    if exp in EXPERIMENTS:
        base = EXPERIMENTS[exp].defaults
        for key in ("grid", "exponent", "budget"):
            if key in base and key not in merged:
                merged[key] = base[key]
    if seed is not None:
        merged["seed"] = seed
    try:
        cfg = ExperimentConfig(**merged)
    except ValidationError as e:
        raise ConfigError([(_field(err["loc"]), err["msg"]) for err in e.errors()]) from None
    entry = EXPERIMENTS[cfg.experiment]
    try:
        params = entry.params(**cfg.params)
    except ValidationError as e:
        raise ConfigError([("params." + _field(err["loc"]), err["msg"])
                           for err in e.errors()]) from None
    errors = []
    try:
        g = cfg.build_grid()
        cfg.build_exponent(g)
    except (ValueError, KeyError, TypeError) as e:
        errors.append(("grid/exponent", str(e)))
    if errors:
        raise ConfigError(errors)
    return cfg.model_copy(update={"params": params.model_dump()})


def load_config(path: str | None, experiment: str, seed: int | None = None) -> ExperimentConfig:
    data = {"experiment": experiment}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as e:
            raise ConfigError([("--config", str(e))]) from None
        except json.JSONDecodeError as e:
            raise ConfigError([("--config", f"invalid JSON: {e}")]) from None
        if not isinstance(data, dict):
            raise ConfigError([("<root>", "config must be a JSON object")])
        data.setdefault("experiment", experiment)
        if data["experiment"] != experiment:
            raise ConfigError([("experiment", f"config is for {data['experiment']!r}, "
                                              f"not {experiment!r}")])
    return make_config(data, seed)


# -- result tables ------------------------------------------------------------

_TYPES = {"str": str, "float": float, "int": int}


@dataclass
class ResultTable:
    """Typed rows plus a provenance block (config echo, version, seed)."""

    columns: list
    types: list
    rows: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.columns) != len(self.types):
            raise ValueError("one type per column")
        for t in self.types:
            if t not in _TYPES:
                raise ValueError(f"unknown column type {t!r}")
        rows, self.rows = self.rows, []
        for r in rows:
            self.add(*r)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} cells, table has {len(self.columns)} columns")
        row = []
        for v, t, c in zip(values, self.types, self.columns):
            if t == "float":
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise TypeError(f"column {c!r} expects a real, got {v!r}")
                v = float(v)
            elif t == "int":
                if isinstance(v, bool) or not isinstance(v, int):
                    if hasattr(v, "__index__"):
                        v = int(v)
                    else:
                        raise TypeError(f"column {c!r} expects an integer, got {v!r}")
            elif not isinstance(v, str):
                raise TypeError(f"column {c!r} expects a string, got {v!r}")
            row.append(v)
        self.rows.append(tuple(row))

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def has_sentinel(self) -> bool:
        return any(isinstance(v, float) and not math.isfinite(v) for r in self.rows for v in r)

    def __eq__(self, other):
        if not isinstance(other, ResultTable):
            return NotImplemented
        return (self.columns == other.columns and self.types == other.types
                and self.provenance == other.provenance
                and len(self.rows) == len(other.rows)
                and all(_same_row(a, b) for a, b in zip(self.rows, other.rows)))


def _same_row(a, b):
    return all(x == y or (isinstance(x, float) and isinstance(y, float)
                          and math.isnan(x) and math.isnan(y)) for x, y in zip(a, b))


def _cell_json(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return v


def _parse_cell(v, t):
    if t == "float":
        return float(v)
    if t == "int":
        return int(v)
    return str(v)


def emit(table: ResultTable, fmt: str = "csv") -> bytes:
    """Serialize a table; CSV follows RFC 4180 with '#' provenance lines."""
    if fmt == "json":
        doc = {"columns": [{"name": c, "type": t} for c, t in zip(table.columns, table.types)],
               "rows": [[_cell_json(v) for v in r] for r in table.rows],
               "provenance": table.provenance}
        return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    for key in sorted(table.provenance):
        buf.write(f"# {key}: {json.dumps(table.provenance[key], sort_keys=True)}\r\n")
    buf.write("# types: " + ",".join(table.types) + "\r\n")
    buf.write(",".join(_quote(c) for c in table.columns) + "\r\n")
    for r in table.rows:
        cells = []
        for v, t in zip(r, table.types):
            if t == "str":
                cells.append(_quote(v))
            elif t == "float":
                cells.append(_float_text(v))
            else:
                cells.append(str(v))
        buf.write(",".join(cells) + "\r\n")
    return buf.getvalue().encode("utf-8")


def _quote(s):
    # strings are always quoted so that text and numbers stay distinguishable
    return '"' + s.replace('"', '""') + '"'


def _float_text(v):
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def parse_json(data: bytes | str) -> ResultTable:
    doc = json.loads(data)
    cols = [c["name"] for c in doc["columns"]]
    types = [c["type"] for c in doc["columns"]]
    rows = [tuple(_parse_cell(v, t) for v, t in zip(r, types)) for r in doc["rows"]]
    return ResultTable(cols, types, rows, doc["provenance"])


def parse_csv(data: bytes | str) -> ResultTable:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    prov, types, body = {}, None, []
    for line in text.split("\r\n"):
        if line.startswith("# types: "):
            types = line[len("# types: "):].split(",") if line[len("# types: "):] else []
        elif line.startswith("# "):
            key, _, val = line[2:].partition(": ")
            prov[key] = json.loads(val)
        else:
            body.append(line)
    reader = csv.reader(io.StringIO("\r\n".join(body)))
    recs = [r for r in reader if r]
    cols = recs[0]
    rows = [tuple(_parse_cell(v, t) for v, t in zip(r, types)) for r in recs[1:]]
    return ResultTable(cols, types, rows, prov)


def run_experiment(cfg: ExperimentConfig) -> ResultTable:
    """Run one experiment; the same config always yields the same table."""
    from .experiments import EXPERIMENTS

    entry = EXPERIMENTS[cfg.experiment]
    params = entry.params(**cfg.params)
    table = entry.run(cfg, params)
    table.provenance = {"config": json.loads(cfg.model_dump_json()),
                        "version": version(), "seed": cfg.seed,
                        "anchor": entry.anchor}
    return table
