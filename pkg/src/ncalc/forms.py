"""Group-valued 1-forms on neighbour spaces: closedness, path integrals, primitives."""
from __future__ import annotations

from itertools import combinations
from typing import Callable, Mapping

from .groups import GroupOps
from .report import CheckReport
from .space import NeighborSpace, NPath, SpaceError, Vertex


class FormError(ValueError):
    pass


class PrimitiveConflict(FormError):
    """Raised when breadth-first integration meets an inconsistent closing edge."""

    def __init__(self, edge, path_y: NPath, path_z: NPath, expected, found):
        self.edge = edge
        self.paths = (path_y, path_z)
        self.expected = expected
        self.found = found
        super().__init__(f"no primitive: closing edge {edge!r} is inconsistent")


class OneForm:
    """Edge labelling with ``w(x, x) = 1`` and ``w(y, x) = w(x, y)^-1``.

    One orientation per edge is stored; the other is derived.  Neighbour pairs
    without a stored value carry the identity.
    """

    def __init__(self, space: NeighborSpace, group: GroupOps, values: Mapping | None = None):
        self.space = space
        self.group = group
        stored: dict[tuple, object] = {}
        for (x, y), g in (values or {}).items():
            if x == y:
                if g != group.identity():
                    raise FormError(f"w({x!r},{x!r}) must be the identity")
                continue
            if not space.neighbors(x, y):
                raise FormError(f"{x!r} and {y!r} are not neighbours")
            if (y, x) in stored:
                if stored[(y, x)] != group.invert(g):
                    raise FormError(f"inconsistent orientations on edge {x!r}|{y!r}")
                continue
            stored[(x, y)] = g
        self.values = stored

    def __call__(self, x: Vertex, y: Vertex):
        if x == y:
            return self.group.identity()
        g = self.values.get((x, y))
        if g is not None:
            return g
        g = self.values.get((y, x))
        if g is not None:
            return self.group.invert(g)
        if not self.space.neighbors(x, y):
            raise FormError(f"{x!r} and {y!r} are not neighbours")
        return self.group.identity()


def make_coboundary(space: NeighborSpace, group: GroupOps, f: Callable | Mapping) -> OneForm:
    """Darboux derivative ``df(x, y) = f(x)^-1 * f(y)``."""
    get = f.__getitem__ if isinstance(f, Mapping) else f
    values = {}
    for pair in space.relation:
        x, y = sorted(pair, key=space.index)
        values[(x, y)] = group.compose(group.invert(get(x)), get(y))
    return OneForm(space, group, values)


def mutual_triples(space: NeighborSpace):
    """Unordered triples of distinct, mutually neighbouring vertices, in vertex order."""
    for x in space.vertices:
        higher = [y for y in space.monad(x) if space.index(y) > space.index(x)]
        for y, z in combinations(higher, 2):
            if space.neighbors(y, z):
                yield (x, y, z)


def is_closed(form: OneForm) -> CheckReport:
    g = form.group
    bad = [t for t in mutual_triples(form.space) if g.compose(form(t[0], t[1]), form(t[1], t[2])) != form(t[0], t[2])]
    return CheckReport(violations=bad)


def path_integral(form: OneForm, path: NPath):
    g = form.group
    out = g.identity()
    for x, y in path.steps():
        out = g.compose(out, form(x, y))
    return out


def quadrangle_defect(form: OneForm, x, y1, y2, z):
    sp = form.space
    for a, b in ((x, y1), (y1, z), (x, y2), (y2, z)):
        if not sp.neighbors(a, b):
            raise FormError(f"not a quadrangle: {a!r} and {b!r} are not neighbours")
    g = form.group
    left = g.compose(form(x, y1), form(y1, z))
    right = g.compose(form(x, y2), form(y2, z))
    return g.compose(left, g.invert(right))


def quadrangles(space: NeighborSpace):
    """All quadrangles ``(x, y1, y2, z)`` with ``y1`` before ``y2`` in vertex order."""
    for x in space.vertices:
        mx = space.monad(x)
        for i, y1 in enumerate(mx):
            for y2 in mx[i + 1:]:
                for z in space.monad(y1):
                    if space.neighbors(y2, z):
                        yield (x, y1, y2, z)


def quadrangle_report(form: OneForm) -> CheckReport:
    e = form.group.identity()
    return CheckReport(violations=[q for q in quadrangles(form.space) if quadrangle_defect(form, *q) != e])


def path_independence_check(form: OneForm, x, y, max_len: int) -> CheckReport:
    """Integrate over every path ``x -> y`` of length ``<= max_len``.

    Paths are visited in lexicographic order with running products; the
    report holds the common value, or the first path and the first later path
    with a different value.
    """
    sp, g = form.space, form.group
    dist = sp.distances(y)
    sp.index(x)
    if x not in dist or dist[x] > max_len:
        return CheckReport(reason="unreachable")
    first: list = []
    pts = [x]

    def walk(acc, remaining):
        v = pts[-1]
        if v == y:
            if not first:
                first.append((tuple(pts), acc))
            elif acc != first[0][1]:
                return (tuple(pts), acc)
        if remaining == 0:
            return None
        for w in sp.monad(v):
            if dist.get(w, remaining) < remaining:
                pts.append(w)
                hit = walk(g.compose(acc, form(v, w)), remaining - 1)
                pts.pop()
                if hit:
                    return hit
        return None

    hit = walk(g.identity(), max_len)
    if hit:
        (p0, v0), (p1, v1) = first[0], hit
        return CheckReport(witness=((NPath(p0), v0), (NPath(p1), v1)))
    return CheckReport(value=first[0][1])


class PrimitiveFn:
    """Normalized primitive on the path component of ``base``."""

    def __init__(self, base, values: dict):
        self.base = base
        self.values = values

    def __call__(self, v):
        return self.values[v]

    def __eq__(self, other):
        if not isinstance(other, PrimitiveFn):
            return NotImplemented
        return self.base == other.base and self.values == other.values

    def __repr__(self):
        return f"PrimitiveFn(base={self.base!r}, {len(self.values)} values)"


def primitive(form: OneForm, x0, tree: str = "bfs") -> PrimitiveFn:
    """Unique ``f`` on the component of ``x0`` with ``f(x0) = 1`` and ``df = w``.

    Integrates along a spanning tree (``"bfs"`` or ``"dfs"``) and then checks
    every non-tree edge; the least inconsistent edge raises PrimitiveConflict.
    """
    sp, g = form.space, form.group
    if tree == "bfs":
        parent = sp.bfs_tree(x0)
    elif tree == "dfs":
        parent = sp.dfs_tree(x0)
    else:
        raise ValueError(f"unknown spanning tree {tree!r}")
    order = sorted(parent, key=lambda v: _depth(parent, v))
    f = {}
    for v in order:
        p = parent[v]
        f[v] = g.identity() if p is None else g.compose(f[p], form(p, v))
    edges = sorted(
        (tuple(sorted(e, key=sp.index)) for e in sp.relation if next(iter(e)) in f),
        key=lambda e: (sp.index(e[0]), sp.index(e[1])),
    )
    for y, z in edges:
        if parent.get(z) == y or parent.get(y) == z:
            continue
        expected = g.compose(f[y], form(y, z))
        if expected != f[z]:
            raise PrimitiveConflict((y, z), sp.tree_path(parent, y), sp.tree_path(parent, z), expected, f[z])
    return PrimitiveFn(x0, f)


def _depth(parent, v):
    d = 0
    while parent[v] is not None:
        v = parent[v]
        d += 1
    return d


def derivative_of(prim: PrimitiveFn, form: OneForm) -> CheckReport:
    """Check ``f(y)^-1 * f(z) = w(y, z)`` on every edge inside the primitive's domain."""
    g = form.group
    bad = []
    for pair in form.space.relation:
        y, z = sorted(pair, key=form.space.index)
        if y in prim.values and g.compose(g.invert(prim(y)), prim(z)) != form(y, z):
            bad.append((y, z))
    return CheckReport(violations=sorted(bad, key=lambda e: (form.space.index(e[0]), form.space.index(e[1]))))
