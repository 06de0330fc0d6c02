"""Deterministic JSON/CSV emission and run-configuration loading.

Floats are serialized with 17 significant digits so every report round-trips
losslessly and identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .geometry import BoundaryData, DomainSpec
from .surfaces import oracle_from_name


def fmt17(x: float) -> str:
    return f"{x:.17g}"


def _encode(obj, indent: int) -> str:
    pad = " " * indent
    inner = " " * (indent + 2)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for key in sorted(obj, key=str):
            items.append(f'{inner}{json.dumps(str(key))}: {_encode(obj[key], indent + 2)}')
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(np.asarray(obj).tolist()) if isinstance(obj, np.ndarray) else list(obj)
        if not seq:
            return "[]"
        items = [f"{inner}{_encode(v, indent + 2)}" for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return json.dumps("inf" if x > 0 else ("-inf" if x < 0 else "nan"))
        return fmt17(x)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj) -> str:
    return _encode(obj, 0) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps_json(obj))


def write_csv(path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt17(float(v)) if isinstance(v, (float, np.floating))
                              else str(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# configuration documents
# ---------------------------------------------------------------------------
# {"domain": {"kind": "rectangle", "x_min": ..., "x_max": ..., "t_min": ...,
#             "t_max": ...} | {"kind": "polygon", "vertices": [[x, t], ...]},
#  "resolution": [nx, nt],
#  "boundary": {"kind": "constant", "value": c}
#            | {"kind": "oracle", "name": "...", "params": {...}}
#            | {"kind": "table", "values": [[x, t, f], ...]}}

def load_config(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    return doc


def domain_from_config(doc: dict) -> DomainSpec:
    try:
        dom = doc["domain"]
        nx, nt = doc["resolution"]
        kind = dom["kind"]
        if kind == "rectangle":
            return DomainSpec.rectangle(dom["x_min"], dom["x_max"],
                                        dom["t_min"], dom["t_max"], nx, nt)
        if kind == "polygon":
            return DomainSpec.polygon([tuple(v) for v in dom["vertices"]], nx, nt)
        raise ConfigError(f"unknown domain kind {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad domain section: {exc}") from exc


def boundary_from_config(doc: dict, domain: DomainSpec) -> BoundaryData:
    try:
        bnd = doc["boundary"]
        kind = bnd["kind"]
        if kind == "constant":
            return BoundaryData.constant(domain, float(bnd["value"]))
        if kind == "oracle":
            oracle = oracle_from_name(bnd["name"], bnd.get("params"))
            return BoundaryData.from_callable(
                domain, lambda x, t: oracle.value((x, t)),
                provenance=f"oracle:{bnd['name']}")
        if kind == "table":
            return BoundaryData.from_table(domain, [tuple(r) for r in bnd["values"]])
        raise ConfigError(f"unknown boundary kind {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad boundary section: {exc}") from exc


def load_problem(path) -> tuple[DomainSpec, BoundaryData, dict]:
    doc = load_config(path)
    domain = domain_from_config(doc)
    boundary = boundary_from_config(doc, domain)
    return domain, boundary, doc
