"""JSON file formats for spaces, forms, connections, series and jet fields."""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

from .affine import (
    AffineConnection,
    lattice_connection,
    sheared_connection,
    table_connection,
    twisted_connection,
)
from .formal import ChristoffelField, CoordOneForm, FormalChart, FormalError
from .forms import FormError, OneForm
from .groups import GroupError, group_from_spec
from .matrix import MatrixSeries
from .series import Series, SeriesError
from .space import NeighborSpace, SpaceError


class FormatError(ValueError):
    """Input file does not match its format; ``location`` names the offending item."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


def canonical(obj: Any) -> str:
    """Canonical JSON text: sorted keys, compact separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def digest(text: str | bytes) -> str:
    if isinstance(text, str):
        text = text.encode()
    return "sha256:" + hashlib.sha256(text).hexdigest()


def read_json(path: str | Path) -> Any:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg}", f"{path}:{exc.lineno}:{exc.colno}") from None


def _expect(cond: bool, msg: str, loc: str):
    if not cond:
        raise FormatError(msg, loc)


# ------------------------------------------------------------------ spaces


def space_from_json(data: Any) -> NeighborSpace:
    _expect(isinstance(data, dict), "space must be an object", "$")
    verts = data.get("vertices")
    _expect(isinstance(verts, list), "missing vertex list", "$.vertices")
    for i, v in enumerate(verts):
        _expect(isinstance(v, str) and v and "|" not in v, "vertex ids are non-empty strings without '|'", f"$.vertices[{i}]")
    edges = data.get("edges", [])
    _expect(isinstance(edges, list), "edges must be a list", "$.edges")
    known = set(verts)
    for i, e in enumerate(edges):
        _expect(isinstance(e, list) and len(e) == 2, "an edge is a pair of vertex ids", f"$.edges[{i}]")
        for v in e:
            _expect(v in known, f"unknown vertex {v!r}", f"$.edges[{i}]")
    try:
        return NeighborSpace(verts, [tuple(e) for e in edges])
    except SpaceError as exc:
        raise FormatError(str(exc), "$") from None


def space_to_json(space: NeighborSpace) -> dict:
    idx = space.index
    edges = sorted((sorted(p, key=idx) for p in space.relation), key=lambda e: (idx(e[0]), idx(e[1])))
    return {"vertices": list(space.vertices), "edges": edges}


# ------------------------------------------------------------------ forms


def form_from_json(data: Any, space: NeighborSpace) -> OneForm:
    _expect(isinstance(data, dict), "form must be an object", "$")
    try:
        group = group_from_spec(data.get("group") or {})
    except (GroupError, KeyError, TypeError) as exc:
        raise FormatError(f"bad group: {exc}", "$.group") from None
    values = {}
    raw = data.get("values", {})
    _expect(isinstance(raw, dict), "values must be an object", "$.values")
    for key, val in raw.items():
        loc = f"$.values[{key!r}]"
        parts = key.split("|")
        _expect(len(parts) == 2, "keys are 'x|y'", loc)
        try:
            g = group.parse(val)
        except GroupError as exc:
            raise FormatError(str(exc), loc) from None
        pair = tuple(parts)
        if pair in values and values[pair] != g:
            raise FormatError("conflicting duplicate", loc)
        values[pair] = g
    try:
        return OneForm(space, group, values)
    except (FormError, SpaceError) as exc:
        raise FormatError(str(exc), "$.values") from None


def form_to_json(form: OneForm) -> dict:
    g = form.group
    return {
        "group": g.describe(),
        "values": {f"{x}|{y}": g.serialize(v) for (x, y), v in form.values.items()},
    }


# ------------------------------------------------------------------ connections


def conn_from_json(data: Any, base: Path | None = None) -> AffineConnection:
    _expect(isinstance(data, dict), "connection must be an object", "$")
    kind = data.get("kind")
    try:
        if kind == "lattice":
            return lattice_connection(int(data["modulus"]), int(data.get("dim", 2)))
        if kind == "twisted":
            perm = data.get("perm")
            return twisted_connection(int(data["modulus"]), int(data.get("dim", 2)), perm=perm, seed=int(data.get("seed", 0)))
        if kind == "sheared":
            return sheared_connection(int(data.get("modulus", 3)), int(data.get("fiber", 2)))
        if kind == "table":
            ref = data.get("space")
            if isinstance(ref, str):
                p = Path(ref) if base is None else base / ref
                space = space_from_json(read_json(p))
            else:
                space = space_from_json(ref)
            entries = {}
            for key, w in (data.get("entries") or {}).items():
                parts = tuple(key.split("|"))
                _expect(len(parts) == 3, "keys are 'z|x|y'", f"$.entries[{key!r}]")
                entries[parts] = w
            return table_connection(space, entries)
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad {kind} connection: {exc}", "$") from None
    raise FormatError(f"unknown connection kind {kind!r}", "$.kind")


# ------------------------------------------------------------------ jets


def _series(data, loc) -> Series:
    try:
        return Series.from_json(data)
    except SeriesError as exc:
        raise FormatError(str(exc), loc) from None


def gamma_from_json(data: Any) -> ChristoffelField:
    _expect(isinstance(data, dict) and "dim" in data and "order" in data, "need dim and order", "$")
    dim, order = int(data["dim"]), int(data["order"])
    comps = {}
    for key, s in (data.get("gamma") or {}).items():
        loc = f"$.gamma[{key!r}]"
        try:
            idx = tuple(int(i) for i in key.split("|"))
        except ValueError:
            raise FormatError("keys are 'c|a|b'", loc) from None
        _expect(len(idx) == 3 and all(0 <= i < dim for i in idx), "index out of range", loc)
        comps[idx] = _series(s, loc)
        _expect(comps[idx].spec.nvars == dim and not comps[idx].spec.nblocks, "series must be in the base variables", loc)
    try:
        return ChristoffelField(dim, order, comps)
    except FormalError as exc:
        raise FormatError(str(exc), "$.gamma") from None


def gamma_to_json(G: ChristoffelField) -> dict:
    return {
        "dim": G.dim,
        "order": G.order,
        "gamma": {f"{c}|{a}|{b}": s.to_json() for (c, a, b), s in sorted(G.gamma.items())},
    }


def omega_from_json(data: Any) -> CoordOneForm:
    _expect(isinstance(data, dict) and "dim" in data, "need dim", "$")
    dim = int(data["dim"])
    raw = data.get("omega") or {}
    mats = []
    for a in range(dim):
        loc = f"$.omega[{str(a)!r}]"
        _expect(str(a) in raw, "missing component", loc)
        try:
            mats.append(MatrixSeries.from_json(raw[str(a)]))
        except SeriesError as exc:
            raise FormatError(str(exc), loc) from None
    form = CoordOneForm(mats)
    _expect(form.size == int(data.get("size", form.size)), "size does not match the matrices", "$.size")
    return form


def omega_to_json(form: CoordOneForm) -> dict:
    return {
        "dim": form.dim,
        "size": form.size,
        "order": form.order,
        "omega": {str(a): m.to_json() for a, m in enumerate(form.omega)},
    }


def map_from_json(data: Any) -> list[Series]:
    _expect(isinstance(data, dict) and "dim" in data, "need dim", "$")
    dim = int(data["dim"])
    raw = data.get("map") or {}
    out = []
    for c in range(dim):
        loc = f"$.map[{str(c)!r}]"
        _expect(str(c) in raw, "missing component", loc)
        out.append(_series(raw[str(c)], loc))
    return out


def map_to_json(components) -> dict:
    order = min(s.order for s in components)
    return {"dim": len(components), "order": order, "map": {str(c): s.to_json() for c, s in enumerate(components)}}


def matrix_map_from_json(data: Any) -> MatrixSeries:
    """A matrix-valued map ``f`` (for Maurer-Cartan input): ``{"matrix": [[series,...],...]}``."""
    _expect(isinstance(data, dict) and "matrix" in data, "need matrix", "$")
    try:
        return MatrixSeries.from_json(data["matrix"])
    except SeriesError as exc:
        raise FormatError(str(exc), "$.matrix") from None


def matrix_map_to_json(m: MatrixSeries) -> dict:
    return {"dim": m.spec.nvars, "order": m.order, "matrix": m.to_json()}


def chart_to_json(chart: FormalChart) -> dict:
    return map_to_json(chart.components)
