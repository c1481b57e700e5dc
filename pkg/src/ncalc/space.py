"""Finite neighbour spaces: a vertex set with a reflexive symmetric relation."""
from __future__ import annotations

from collections import deque
from typing import Hashable, Iterable, Iterator, Sequence

Vertex = Hashable


class SpaceError(ValueError):
    pass


class NotAPath(SpaceError):
    def __init__(self, index: int, points: Sequence[Vertex]):
        self.index = index
        super().__init__(
            f"points[{index}]={points[index]!r} and points[{index + 1}]={points[index + 1]!r} "
            "are not neighbours"
        )


class NeighborSpace:
    """Immutable vertex set with a reflexive symmetric neighbour relation.

    Reflexive pairs are implicit and never stored.  Vertex order is the
    construction order and drives every enumeration.
    """

    def __init__(self, vertices: Iterable[Vertex], edges: Iterable[Sequence[Vertex]] = ()):
        verts = tuple(vertices)
        index: dict[Vertex, int] = {}
        for v in verts:
            if v in index:
                raise SpaceError(f"duplicate vertex {v!r}")
            index[v] = len(index)
        relation: set[frozenset] = set()
        for e in edges:
            a, b = e
            for v in (a, b):
                if v not in index:
                    raise SpaceError(f"edge {tuple(e)!r} references unknown vertex {v!r}")
            if a != b:
                relation.add(frozenset((a, b)))
        self._vertices = verts
        self._index = index
        self._relation = frozenset(relation)
        adj: dict[Vertex, list[Vertex]] = {v: [v] for v in verts}
        for pair in relation:
            a, b = tuple(pair)
            adj[a].append(b)
            adj[b].append(a)
        self._monads = {v: tuple(sorted(ns, key=index.__getitem__)) for v, ns in adj.items()}
        self._monad_sets = {v: frozenset(ns) for v, ns in self._monads.items()}
        self._components: dict[Vertex, tuple] = {}

    @property
    def vertices(self) -> tuple:
        return self._vertices

    @property
    def relation(self) -> frozenset:
        return self._relation

    def __len__(self) -> int:
        return len(self._vertices)

    def __contains__(self, v) -> bool:
        return v in self._index

    def __eq__(self, other) -> bool:
        if not isinstance(other, NeighborSpace):
            return NotImplemented
        return self._vertices == other._vertices and self._relation == other._relation

    def __hash__(self) -> int:
        return hash((self._vertices, self._relation))

    def __repr__(self) -> str:
        return f"NeighborSpace({len(self._vertices)} vertices, {len(self._relation)} edges)"

    def index(self, v: Vertex) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise SpaceError(f"unknown vertex {v!r}") from None

    def neighbors(self, x: Vertex, y: Vertex) -> bool:
        return y in self._monad_sets[x] if x in self._index else False

    def monad(self, x: Vertex) -> tuple:
        """Neighbours of ``x`` (including ``x``) in vertex order."""
        self.index(x)
        return self._monads[x]

    def infinity_monad(self, x: Vertex) -> tuple:
        """Path component of ``x``, in breadth-first discovery order."""
        self.index(x)
        if x not in self._components:
            seen = {x}
            order = [x]
            queue = deque([x])
            while queue:
                v = queue.popleft()
                for w in self._monads[v]:
                    if w not in seen:
                        seen.add(w)
                        order.append(w)
                        queue.append(w)
            comp = tuple(order)
            for v in comp:
                self._components[v] = comp
        return self._components[x]

    def components(self) -> list[tuple]:
        out, seen = [], set()
        for v in self._vertices:
            if v not in seen:
                comp = self.infinity_monad(v)
                seen.update(comp)
                out.append(comp)
        return out

    def is_connected(self) -> bool:
        return len(self._vertices) > 0 and len(self.components()) == 1

    def distances(self, x: Vertex) -> dict:
        """Edge-count distance from ``x`` to every vertex of its component."""
        self.index(x)
        dist = {x: 0}
        queue = deque([x])
        while queue:
            v = queue.popleft()
            for w in self._monads[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        return dist

    def bfs_tree(self, x: Vertex) -> dict:
        """Parent map of the breadth-first spanning tree rooted at ``x``."""
        self.index(x)
        parent = {x: None}
        queue = deque([x])
        while queue:
            v = queue.popleft()
            for w in self._monads[v]:
                if w not in parent:
                    parent[w] = v
                    queue.append(w)
        return parent

    def dfs_tree(self, x: Vertex) -> dict:
        self.index(x)
        parent = {x: None}
        stack = [x]
        while stack:
            v = stack.pop()
            for w in reversed(self._monads[v]):
                if w not in parent:
                    parent[w] = v
                    stack.append(w)
        return parent

    def tree_path(self, parent: dict, y: Vertex) -> "NPath":
        pts = [y]
        while parent[pts[-1]] is not None:
            pts.append(parent[pts[-1]])
        return NPath(tuple(reversed(pts)))

    def shortest_path(self, x: Vertex, y: Vertex) -> "NPath":
        """Breadth-first tree path, lexicographic tie-break by vertex order."""
        parent = self.bfs_tree(x)
        if y not in parent:
            raise SpaceError(f"{y!r} is not reachable from {x!r}")
        return self.tree_path(parent, y)

    def validate_path(self, seq: Sequence[Vertex]) -> "NPath":
        pts = tuple(seq)
        if not pts:
            raise SpaceError("a path needs at least one point")
        for v in pts:
            self.index(v)
        for i in range(len(pts) - 1):
            if pts[i + 1] not in self._monad_sets[pts[i]]:
                raise NotAPath(i, pts)
        return NPath(pts)

    def enumerate_paths(self, x: Vertex, y: Vertex, max_len: int) -> Iterator["NPath"]:
        """All paths ``x -> y`` of length at most ``max_len``, lexicographic in vertex order."""
        if max_len < 0:
            raise SpaceError("max_len must be non-negative")
        self.index(x)
        self.index(y)
        dist_to_y = self.distances(y)
        if x not in dist_to_y:
            return
        pts = [x]

        def walk(remaining):
            v = pts[-1]
            if v == y:
                yield NPath(tuple(pts))
            if remaining == 0:
                return
            for w in self._monads[v]:
                if dist_to_y.get(w, remaining) < remaining:
                    pts.append(w)
                    yield from walk(remaining - 1)
                    pts.pop()

        yield from walk(max_len)


class NPath:
    """An n-path: n+1 points with consecutive members neighbours."""

    __slots__ = ("points",)

    def __init__(self, points: Sequence[Vertex]):
        self.points = tuple(points)

    @property
    def length(self) -> int:
        return len(self.points) - 1

    @property
    def domain(self) -> Vertex:
        return self.points[0]

    @property
    def codomain(self) -> Vertex:
        return self.points[-1]

    def __len__(self) -> int:
        return self.length

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def steps(self):
        return zip(self.points, self.points[1:])

    def __eq__(self, other) -> bool:
        if isinstance(other, NPath):
            return self.points == other.points
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.points)

    def __repr__(self) -> str:
        return f"NPath{self.points!r}"

    def reversed(self) -> "NPath":
        return NPath(self.points[::-1])


def concat(p: NPath, q: NPath) -> NPath:
    if p.codomain != q.domain:
        raise SpaceError(f"cannot concatenate: {p.codomain!r} != {q.domain!r}")
    return NPath(p.points + q.points[1:])


def build_space(vertices: Iterable[Vertex], edges: Iterable[Sequence[Vertex]] = ()) -> NeighborSpace:
    return NeighborSpace(vertices, edges)


def torus(modulus: int, dim: int = 2) -> NeighborSpace:
    """Z_m^dim with unit-step neighbours; vertex ids are ``"i,j,..."`` strings."""
    from itertools import product

    coords = list(product(range(modulus), repeat=dim))
    name = lambda c: ",".join(map(str, c))
    edges = []
    for c in coords:
        for a in range(dim):
            d = list(c)
            d[a] = (d[a] + 1) % modulus
            edges.append((name(c), name(d)))
    return NeighborSpace([name(c) for c in coords], edges)
