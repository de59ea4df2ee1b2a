"""Graph files and sweep-record tables.

Graph file layout (plain text, one item per line)::

    qnrobust-graph 1
    region_half_width <float>
    gamma <float>
    min_distance <float>
    provenance <json object>
    nodes <n>
    <id> <x> <y> <origin_id>      (n lines, ids 0..n-1 in order)
    edges <m>
    <u> <v>                       (m lines, u < v, sorted)

Floats are written with 17 significant digits so a load reproduces every
coordinate, and therefore every derived capacity, bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable

import numpy as np

from ..errors import DataError, GraphFormatError
from ..geo_channel import ChannelParams
from ..netgen import GeoGraph
from .sweep import SweepRecord

MAGIC = "qnrobust-graph"
VERSION = "1"


def _f(x: float) -> str:
    return format(float(x), ".17g")


def dumps_graph(g: GeoGraph) -> str:
    lines = [
        f"{MAGIC} {VERSION}",
        f"region_half_width {_f(g.region_half_width)}",
        f"gamma {_f(g.channel.gamma)}",
        f"min_distance {_f(g.channel.min_distance)}",
        f"provenance {json.dumps(g.provenance, sort_keys=True)}",
        f"nodes {g.n_nodes}",
    ]
    lines += [f"{i} {_f(x)} {_f(y)} {o}" for i, ((x, y), o) in enumerate(zip(g.coords, g.origin_ids))]
    lines.append(f"edges {g.n_edges}")
    lines += [f"{u} {v}" for u, v in g.iter_edges()]
    return "\n".join(lines) + "\n"


def save_graph(g: GeoGraph, path: str | Path) -> None:
    try:
        Path(path).write_text(dumps_graph(g))
    except OSError as exc:
        raise OSError(f"cannot write graph to {path}: {exc.strerror or exc}") from exc


class _Lines:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0

    def next(self, what: str) -> tuple[int, str]:
        if self.pos >= len(self.lines):
            raise GraphFormatError(f"unexpected end of file, expected {what}", line=self.pos + 1, field=what)
        self.pos += 1
        return self.pos, self.lines[self.pos - 1]

    def keyed(self, key: str) -> tuple[int, str]:
        lineno, line = self.next(key)
        name, _, value = line.partition(" ")
        if name != key:
            raise GraphFormatError(f"expected {key!r}, found {name!r}", line=lineno, field=key)
        return lineno, value.strip()


def _num(text: str, kind, lineno: int, field: str):
    try:
        value = kind(text)
    except ValueError:
        raise GraphFormatError(f"not a valid {kind.__name__}: {text!r}", line=lineno, field=field) from None
    if kind is float and not math.isfinite(value):
        raise GraphFormatError(f"non-finite value {text!r}", line=lineno, field=field)
    return value


def loads_graph(text: str) -> GeoGraph:
    src = _Lines(text)
    lineno, header = src.next("header")
    if header.split() != [MAGIC, VERSION]:
        raise GraphFormatError(f"not a {MAGIC} v{VERSION} file", line=lineno, field="header")
    lineno, v = src.keyed("region_half_width")
    R = _num(v, float, lineno, "region_half_width")
    lineno, v = src.keyed("gamma")
    gamma = _num(v, float, lineno, "gamma")
    lineno, v = src.keyed("min_distance")
    min_distance = _num(v, float, lineno, "min_distance")
    try:
        channel = ChannelParams(gamma, min_distance)
    except ValueError as exc:
        raise GraphFormatError(str(exc), line=lineno, field="channel") from None
    lineno, v = src.keyed("provenance")
    try:
        provenance = json.loads(v)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"bad JSON: {exc.msg}", line=lineno, field="provenance") from None
    if not isinstance(provenance, dict):
        raise GraphFormatError("provenance must be a JSON object", line=lineno, field="provenance")

    lineno, v = src.keyed("nodes")
    n = _num(v, int, lineno, "nodes")
    coords = np.empty((n, 2))
    origin = np.empty(n, dtype=np.int64)
    for i in range(n):
        lineno, line = src.next("node")
        parts = line.split()
        if len(parts) != 4:
            raise GraphFormatError(f"node line needs 4 fields, got {len(parts)}", line=lineno, field="node")
        if _num(parts[0], int, lineno, "id") != i:
            raise GraphFormatError(f"node ids must be contiguous, expected {i}", line=lineno, field="id")
        coords[i] = _num(parts[1], float, lineno, "x"), _num(parts[2], float, lineno, "y")
        origin[i] = _num(parts[3], int, lineno, "origin_id")
        if abs(coords[i, 0]) > R or abs(coords[i, 1]) > R:
            raise GraphFormatError(f"node {i} lies outside the region", line=lineno, field="x/y")

    lineno, v = src.keyed("edges")
    m = _num(v, int, lineno, "edges")
    edges = np.empty((m, 2), dtype=np.int64)
    for k in range(m):
        lineno, line = src.next("edge")
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"edge line needs 2 fields, got {len(parts)}", line=lineno, field="edge")
        for j, (name, tok) in enumerate(zip(("u", "v"), parts)):
            node = _num(tok, int, lineno, name)
            if not 0 <= node < n:
                raise GraphFormatError(f"edge references unknown node id {node}", line=lineno, field=name)
            edges[k, j] = node
    if any(line.strip() for line in src.lines[src.pos :]):
        raise GraphFormatError("trailing content after edge list", line=src.pos + 1)
    try:
        return GeoGraph(coords, edges, R, channel, provenance, origin)
    except DataError as exc:
        raise GraphFormatError(str(exc)) from None


def load_graph(path: str | Path) -> GeoGraph:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read graph from {path}: {exc.strerror or exc}") from exc
    return loads_graph(text)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return _f(value)
    return str(value)


def dumps_records(records: Iterable[SweepRecord], fmt: str = "csv") -> str:
    records = list(records)
    if not records:
        raise DataError("no records to write")
    cols = SweepRecord.columns()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(cols)
        for r in records:
            writer.writerow([_cell(getattr(r, c)) for c in cols])
        return buf.getvalue()
    if fmt == "json":
        rows = []
        for r in records:
            row = {}
            for c in cols:
                v = getattr(r, c)
                if v is None:
                    continue
                row[c] = None if isinstance(v, float) and math.isnan(v) else v
            rows.append(row)
        return json.dumps(rows, indent=1) + "\n"
    raise ValueError(f"unknown record format {fmt!r}")


def write_records(records: Iterable[SweepRecord], path: str | Path, fmt: str = "csv") -> None:
    text = dumps_records(records, fmt)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write records to {path}: {exc.strerror or exc}") from exc


_INT_COLS = {"realization", "n_nodes", "n_edges"}
_STR_COLS = {"model", "error_kind", "error"}


def read_records(path: str | Path) -> list[SweepRecord]:
    """Parse a CSV written by :func:`write_records`."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            kwargs = {}
            for c, v in row.items():
                if c in _STR_COLS:
                    kwargs[c] = v
                elif v == "":
                    kwargs[c] = None
                elif c in _INT_COLS:
                    kwargs[c] = int(v)
                else:
                    kwargs[c] = float(v)
            out.append(SweepRecord(**kwargs))
    return out
