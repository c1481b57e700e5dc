"""Groupoids over a neighbour space and connections in them.

Composition is written left to right: ``compose(f, g)`` is "first f, then g".
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Any, Hashable, Mapping

from .forms import OneForm, mutual_triples
from .groups import GroupOps
from .report import CheckReport
from .space import NeighborSpace, NPath, Vertex


class GroupoidError(ValueError):
    pass


@dataclass(frozen=True)
class Arrow:
    source: Hashable
    target: Hashable
    payload: Any


class Groupoid:
    def __init__(self, space: NeighborSpace):
        self.space = space

    def identity(self, x) -> Arrow:
        raise NotImplementedError

    def compose(self, f: Arrow, g: Arrow) -> Arrow:
        raise NotImplementedError

    def invert(self, f: Arrow) -> Arrow:
        raise NotImplementedError

    def _check_composable(self, f: Arrow, g: Arrow):
        if f.target != g.source:
            raise GroupoidError(f"cannot compose {f.source!r}->{f.target!r} with {g.source!r}->{g.target!r}")


class ConstantGroupoid(Groupoid):
    """``M x M x G``: arrows ``(x, y, g)`` with ``(x,y,g).(y,z,h) = (x,z,g*h)``."""

    def __init__(self, space: NeighborSpace, group: GroupOps):
        super().__init__(space)
        self.group = group

    def identity(self, x):
        return Arrow(x, x, self.group.identity())

    def compose(self, f, g):
        self._check_composable(f, g)
        return Arrow(f.source, g.target, self.group.compose(f.payload, g.payload))

    def invert(self, f):
        return Arrow(f.target, f.source, self.group.invert(f.payload))


class GLGroupoid(Groupoid):
    """Arrows ``x -> y`` are bijections ``M(x) -> M(y)`` sending ``x`` to ``y``.

    Payloads are tuples of ``(point, image)`` pairs in vertex order.
    """

    def identity(self, x):
        return Arrow(x, x, tuple((z, z) for z in self.space.monad(x)))

    def compose(self, f, g):
        self._check_composable(f, g)
        gm = dict(g.payload)
        return Arrow(f.source, g.target, tuple((z, gm[w]) for z, w in f.payload))

    def invert(self, f):
        order = self.space.index
        return Arrow(f.target, f.source, tuple(sorted(((w, z) for z, w in f.payload), key=lambda p: order(p[0]))))

    def make_arrow(self, x, y, mapping: Mapping) -> Arrow:
        mx, my = self.space.monad(x), self.space.monad(y)
        images = [mapping[z] for z in mx]
        if mapping[x] != y or sorted(images, key=self.space.index) != list(my):
            raise GroupoidError(f"not a bijection M({x!r}) -> M({y!r}) taking {x!r} to {y!r}")
        return Arrow(x, y, tuple((z, mapping[z]) for z in mx))

    def arrows(self, x, y):
        """Enumerate every arrow ``x -> y``."""
        mx, my = self.space.monad(x), self.space.monad(y)
        if len(mx) != len(my):
            return
        rest_x = [z for z in mx if z != x]
        rest_y = [w for w in my if w != y]
        for perm in permutations(rest_y):
            m = dict(zip(rest_x, perm))
            m[x] = y
            yield Arrow(x, y, tuple((z, m[z]) for z in mx))

    @staticmethod
    def apply(f: Arrow, z):
        return dict(f.payload)[z]


class Connection:
    """Assignment of an arrow ``x -> y`` to every neighbour pair.

    ``arrows`` may hold one or both orientations of each edge; a missing
    orientation is the inverse of the stored one.  ``(x, x)`` is the identity.
    """

    def __init__(self, groupoid: Groupoid, arrows: Mapping[tuple, Arrow]):
        self.groupoid = groupoid
        sp = groupoid.space
        for (x, y), a in arrows.items():
            if not sp.neighbors(x, y):
                raise GroupoidError(f"{x!r} and {y!r} are not neighbours")
            if (a.source, a.target) != (x, y):
                raise GroupoidError(f"arrow for ({x!r},{y!r}) runs {a.source!r}->{a.target!r}")
        self.arrows = dict(arrows)

    @property
    def space(self) -> NeighborSpace:
        return self.groupoid.space

    def __call__(self, x, y) -> Arrow:
        if x == y and (x, x) not in self.arrows:
            return self.groupoid.identity(x)
        a = self.arrows.get((x, y))
        if a is not None:
            return a
        b = self.arrows.get((y, x))
        if b is not None:
            return self.groupoid.invert(b)
        if self.space.neighbors(x, y):
            raise GroupoidError(f"connection undefined on ({x!r},{y!r})")
        raise GroupoidError(f"{x!r} and {y!r} are not neighbours")


def is_flat(conn: Connection) -> CheckReport:
    G = conn.groupoid
    bad = [t for t in mutual_triples(conn.space) if G.compose(conn(t[0], t[1]), conn(t[1], t[2])) != conn(t[0], t[2])]
    return CheckReport(violations=bad)


def inverse_law(conn: Connection) -> CheckReport:
    """``conn(x,y).conn(y,x) = 1_x`` on every ordered neighbour pair."""
    G = conn.groupoid
    bad = []
    for x in conn.space.vertices:
        for y in conn.space.monad(x):
            if G.compose(conn(x, y), conn(y, x)) != G.identity(x):
                bad.append((x, y))
    return CheckReport(violations=bad)


def transport_n(conn: Connection, path: NPath) -> Arrow:
    G = conn.groupoid
    out = G.identity(path.domain)
    for x, y in path.steps():
        out = G.compose(out, conn(x, y))
    return out


def holonomous_check(conn: Connection, x, y, max_len: int) -> CheckReport:
    first = None
    for p in conn.space.enumerate_paths(x, y, max_len):
        a = transport_n(conn, p)
        if first is None:
            first = (p, a)
        elif a != first[1]:
            return CheckReport(witness=(first, (p, a)))
    if first is None:
        return CheckReport(reason="unreachable")
    return CheckReport(value=first[1])


def from_one_form(form: OneForm) -> Connection:
    G = ConstantGroupoid(form.space, form.group)
    arrows = {(x, y): Arrow(x, y, g) for (x, y), g in form.values.items()}
    return Connection(G, arrows)


def to_one_form(conn: Connection) -> OneForm:
    G = conn.groupoid
    if not isinstance(G, ConstantGroupoid):
        raise GroupoidError("only connections in a constant groupoid encode a 1-form")
    values = {}
    for pair in conn.space.relation:
        x, y = sorted(pair, key=conn.space.index)
        values[(x, y)] = conn(x, y).payload
    return OneForm(conn.space, G.group, values)


def gl_groupoid(space: NeighborSpace) -> GLGroupoid:
    return GLGroupoid(space)
