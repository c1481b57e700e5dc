"""Discrete affine connections ``[zxy]``: axioms, grids, the cube lemma and heaps.

A connection is a table over admissible triples ``(z, x, y)`` with ``x ~ y``
and ``x ~ z``.  Generators for lattice, conjugated ("twisted") lattice and a
curved central extension ("sheared") are provided.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Sequence

from .groupoid import Arrow, Connection, GLGroupoid
from .report import CheckReport
from .space import NeighborSpace, NPath, SpaceError, Vertex, torus


class AffineError(ValueError):
    pass


class TotalityError(AffineError):
    def __init__(self, triple):
        self.triple = triple
        super().__init__(f"connection undefined on admissible triple z|x|y = {'|'.join(map(str, triple))}")


class NotAdmissible(AffineError):
    pass


class AffineConnection:
    """Partial ternary operation ``[z x y]``, defined when ``x ~ y`` and ``x ~ z``."""

    def __init__(self, space: NeighborSpace, table: Mapping[tuple, Vertex], name: str = "table"):
        self.space = space
        self.table = dict(table)
        self.name = name
        self._symmetric: bool | None = None

    def __call__(self, z, x, y):
        w = self.table.get((z, x, y))
        if w is None:
            sp = self.space
            if not (sp.neighbors(x, y) and sp.neighbors(x, z)):
                raise NotAdmissible(f"[{z} {x} {y}] needs {x!r} ~ {y!r} and {x!r} ~ {z!r}")
            raise TotalityError((z, x, y))
        return w

    def admissible(self):
        for x in self.space.vertices:
            m = self.space.monad(x)
            for z in m:
                for y in m:
                    yield (z, x, y)

    @property
    def symmetric(self) -> bool:
        if self._symmetric is None:
            self._symmetric = all(self(z, x, y) == self(y, x, z) for z, x, y in self.admissible())
        return self._symmetric

    def __repr__(self):
        return f"AffineConnection({self.name}, {self.space!r})"


# ---------------------------------------------------------------- generators


def _coords(v: str) -> tuple:
    return tuple(int(c) for c in v.split(","))


def _name(c) -> str:
    return ",".join(map(str, c))


def lattice_connection(modulus: int, dim: int = 2) -> AffineConnection:
    """``[zxy] = z - x + y`` on the unit-step torus ``Z_m^dim``."""
    sp = torus(modulus, dim)
    coords = {v: _coords(v) for v in sp.vertices}
    table = {}
    for x in sp.vertices:
        m = sp.monad(x)
        cx = coords[x]
        for z in m:
            for y in m:
                table[(z, x, y)] = _name((a - b + c) % modulus for a, b, c in zip(coords[z], cx, coords[y]))
    return AffineConnection(sp, table, name=f"lattice Z{modulus}^{dim}")


def conjugate(conn: AffineConnection, perm: Sequence[int], name: str | None = None) -> AffineConnection:
    """Transport ``conn`` along the vertex bijection ``v_i -> v_perm[i]``."""
    verts = conn.space.vertices
    if sorted(perm) != list(range(len(verts))):
        raise AffineError("perm must be a permutation of vertex indices")
    pi = {v: verts[perm[i]] for i, v in enumerate(verts)}
    edges = [tuple(pi[v] for v in e) for e in conn.space.relation]
    sp = NeighborSpace(verts, edges)
    table = {(pi[z], pi[x], pi[y]): pi[w] for (z, x, y), w in conn.table.items()}
    return AffineConnection(sp, table, name=name or f"twisted {conn.name}")


def twisted_connection(modulus: int, dim: int = 2, perm: Sequence[int] | None = None, seed: int = 0):
    base = lattice_connection(modulus, dim)
    if perm is None:
        perm = list(range(len(base.space)))
        random.Random(seed).shuffle(perm)
    return conjugate(base, perm, name=f"twisted Z{modulus}^{dim}")


def sheared_connection(modulus: int = 3, fiber: int = 2) -> AffineConnection:
    """Curved symmetric connection on ``Z_m^3 x Z_q``.

    Neighbours differ by a unit step (or nothing) in the base and arbitrarily
    in the fibre.  ``[zxy] = z - x + y + s(x)(u1 v2 + u2 v1) e_fibre`` where
    ``u, v`` are the base steps of ``z - x, y - x`` and ``s(x) = [x3 == 0]``.
    """
    if modulus < 3:
        raise AffineError("sheared connection needs modulus >= 3")
    base = list(product(range(modulus), repeat=3))
    verts = [_name(b + (f,)) for b in base for f in range(fiber)]
    coords = {v: _coords(v) for v in verts}

    def step(a, b):
        d = [((q - p + 1) % modulus) - 1 for p, q in zip(a[:3], b[:3])]
        return d if sum(1 for t in d if t) <= 1 else None

    edges = [(a, b) for i, a in enumerate(verts) for b in verts[i + 1:] if step(coords[a], coords[b])]
    sp = NeighborSpace(verts, edges)
    table = {}
    for x in verts:
        cx = coords[x]
        m = sp.monad(x)
        for z in m:
            u = step(cx, coords[z])
            for y in m:
                v = step(cx, coords[y])
                s = (u[0] * v[1] + u[1] * v[0]) if cx[2] == 0 else 0
                w = [(a - b + c) for a, b, c in zip(coords[z], cx, coords[y])]
                w = [t % modulus for t in w[:3]] + [(w[3] + s) % fiber]
                table[(z, x, y)] = _name(w)
    return AffineConnection(sp, table, name=f"sheared Z{modulus}^3 x Z{fiber}")


def table_connection(space: NeighborSpace, entries: Mapping[tuple, Vertex]) -> AffineConnection:
    for triple, w in entries.items():
        z, x, y = triple
        if not (space.neighbors(x, y) and space.neighbors(x, z)):
            raise NotAdmissible(f"table entry {'|'.join(map(str, triple))} is not admissible")
        space.index(w)
    return AffineConnection(space, entries)


# ---------------------------------------------------------------- axioms


@dataclass
class AxiomReport(CheckReport):
    asymmetric: list = field(default_factory=list)

    @property
    def symmetric(self) -> bool:
        return not self.asymmetric


def validate_axioms(conn: AffineConnection) -> AxiomReport:
    """Book-keeping, unit laws and inversion on all admissible triples; symmetry separately.

    Raises TotalityError naming the first admissible triple with no value.
    """
    sp = conn.space
    for t in conn.admissible():
        if t not in conn.table:
            raise TotalityError(t)
    bad, asym = [], []
    for z, x, y in conn.admissible():
        w = conn(z, x, y)
        if not (sp.neighbors(w, y) and sp.neighbors(w, z)):
            bad.append(("book-keeping", (z, x, y)))
            continue
        if y == x and w != z:
            bad.append(("unit [zxx]=z", (z, x, y)))
        if z == x and w != y:
            bad.append(("unit [xxy]=y", (z, x, y)))
        if conn(w, y, x) != z:
            bad.append(("inversion", (z, x, y)))
        if w != conn(y, x, z):
            asym.append((z, x, y))
    return AxiomReport(violations=bad, asymmetric=asym)


def hat(conn: AffineConnection) -> Connection:
    """GL(M)-valued connection ``x, y |-> (z |-> [zxy])``."""
    G = GLGroupoid(conn.space)
    sp = conn.space
    arrows = {}
    for x in sp.vertices:
        for y in sp.monad(x):
            arrows[(x, y)] = G.make_arrow(x, y, {z: conn(z, x, y) for z in sp.monad(x)})
    for (x, y), a in arrows.items():
        if G.compose(a, arrows[(y, x)]) != G.identity(x):
            raise AffineError(f"inversion law fails on the edge {x!r}, {y!r}")
    return Connection(G, arrows)


def weak_flatness_check(conn: AffineConnection) -> CheckReport:
    """``[[z x0 x1] x1 [x1 x0 x2]] = [[z x0 x2] x2 [x2 x0 x1]]`` for all neighbours of x0."""
    if not conn.symmetric:
        return CheckReport(reason="connection is not symmetric")
    sp = conn.space
    bad = []
    for x0 in sp.vertices:
        m = sp.monad(x0)
        for x1 in m:
            for x2 in m:
                p12 = conn(x1, x0, x2)
                p21 = conn(x2, x0, x1)
                for z in m:
                    if conn(conn(z, x0, x1), x1, p12) != conn(conn(z, x0, x2), x2, p21):
                        bad.append((x0, x1, x2, z))
    return CheckReport(violations=bad)


# ---------------------------------------------------------------- grids


def _as_path(sp: NeighborSpace, p) -> NPath:
    return sp.validate_path(p.points if isinstance(p, NPath) else p)


@dataclass(frozen=True)
class Grid2D:
    u: tuple
    y_path: NPath
    z_path: NPath

    @property
    def domain(self):
        return self.u[0][0]

    @property
    def codomain(self):
        return self.u[-1][-1]

    def transpose(self) -> tuple:
        return tuple(zip(*self.u))


def grid2(conn: AffineConnection, y_path, z_path) -> Grid2D:
    """Grid with ``u[0][j] = y_j``, ``u[i][0] = z_i`` and ``u[i+1][j+1] = [u[i+1][j] u[i][j] u[i][j+1]]``."""
    sp = conn.space
    yp, zp = _as_path(sp, y_path), _as_path(sp, z_path)
    if yp.domain != zp.domain:
        raise AffineError(f"paths start at {yp.domain!r} and {zp.domain!r}")
    n, m = yp.length, zp.length
    u = [[None] * (n + 1) for _ in range(m + 1)]
    u[0] = list(yp.points)
    for i in range(1, m + 1):
        u[i][0] = zp[i]
    for i in range(m):
        for j in range(n):
            u[i + 1][j + 1] = conn(u[i + 1][j], u[i][j], u[i][j + 1])
    return Grid2D(tuple(map(tuple, u)), yp, zp)


def grid2_codomain_invariance(conn: AffineConnection, x, yend, zend, max_len: int) -> CheckReport:
    sp = conn.space
    ys = list(sp.enumerate_paths(x, yend, max_len))
    zs = list(sp.enumerate_paths(x, zend, max_len))
    if not ys or not zs:
        return CheckReport(reason="unreachable")
    first = None
    for yp in ys:
        for zp in zs:
            c = grid2(conn, yp, zp).codomain
            if first is None:
                first = ((yp, zp), c)
            elif c != first[1]:
                return CheckReport(witness=(first, ((yp, zp), c)))
    return CheckReport(value=first[1])


# Six expressions of the cube lemma, named by the binary labels 0,1,2,4.
CUBE_EQUATIONS = (
    ("[[401]1[102]]", "[[402]2[201]]"),
    ("[[204]4[401]]", "[[201]1[104]]"),
    ("[[102]2[204]]", "[[104]4[402]]"),
)


@dataclass
class CubeReport(CheckReport):
    values: dict = field(default_factory=dict)
    cube: dict | None = None


def cube_expressions(conn: AffineConnection, p0, p1, p2, p4) -> dict:
    p = {0: p0, 1: p1, 2: p2, 4: p4}

    def br(a, b, c):
        return conn(p[a], p[b], p[c])

    def outer(a, b, c, m, d, e, f):
        return conn(br(a, b, c), p[m], br(d, e, f))

    return {
        "[[401]1[102]]": outer(4, 0, 1, 1, 1, 0, 2),
        "[[402]2[201]]": outer(4, 0, 2, 2, 2, 0, 1),
        "[[204]4[401]]": outer(2, 0, 4, 4, 4, 0, 1),
        "[[201]1[104]]": outer(2, 0, 1, 1, 1, 0, 4),
        "[[102]2[204]]": outer(1, 0, 2, 2, 2, 0, 4),
        "[[104]4[402]]": outer(1, 0, 4, 4, 4, 0, 2),
    }


def cube_check(conn: AffineConnection, p0, p1, p2, p4) -> CubeReport:
    """Evaluate the six cube expressions; on agreement return the 8-vertex cube."""
    sp = conn.space
    for q in (p1, p2, p4):
        if not sp.neighbors(p0, q):
            raise AffineError(f"{q!r} is not a neighbour of {p0!r}")
    if not conn.symmetric:
        return CubeReport(reason="connection is not symmetric")
    vals = cube_expressions(conn, p0, p1, p2, p4)
    failing = [f"{a}={b}" for a, b in CUBE_EQUATIONS if vals[a] != vals[b]]
    rep = CubeReport(violations=failing, values=vals)
    if not failing and len(set(vals.values())) == 1:
        rep.cube = {
            0: p0, 1: p1, 2: p2, 4: p4,
            3: conn(p1, p0, p2), 5: conn(p1, p0, p4), 6: conn(p2, p0, p4),
            7: vals["[[401]1[102]]"],
        }
    elif not failing:
        rep.violations = ["equations hold pairwise but the three values differ"]
    return rep


def cube_check_all(conn: AffineConnection) -> CheckReport:
    """Cube lemma on every admissible ``(p0, p1, p2, p4)``; violations carry the failing equations."""
    if not conn.symmetric:
        return CheckReport(reason="connection is not symmetric")
    sp = conn.space
    bad = []
    for p0 in sp.vertices:
        m = sp.monad(p0)
        for p1 in m:
            for p2 in m:
                for p4 in m:
                    rep = cube_check(conn, p0, p1, p2, p4)
                    if not rep.ok:
                        bad.append(((p0, p1, p2, p4), rep.violations))
    return CheckReport(violations=bad)


@dataclass(frozen=True)
class Grid3D:
    w: tuple
    x_path: NPath
    y_path: NPath
    z_path: NPath

    @property
    def codomain(self):
        return self.w[-1][-1][-1]

    def face(self, which: str) -> tuple:
        """``"xy"``, ``"xz"`` or ``"yz"`` face through the common domain."""
        w = self.w
        if which == "xy":
            return tuple(tuple(w[i][j][0] for j in range(len(w[0]))) for i in range(len(w)))
        if which == "xz":
            return tuple(tuple(w[i][0][l] for l in range(len(w[0][0]))) for i in range(len(w)))
        if which == "yz":
            return tuple(tuple(w[0][j][l] for l in range(len(w[0][0]))) for j in range(len(w[0])))
        raise ValueError(which)


def grid3(conn: AffineConnection, x_path, y_path, z_path) -> Grid3D:
    """3-dimensional grid: faces by parallelogram completion, cells by the cube lemma."""
    sp = conn.space
    xp, yp, zp = (_as_path(sp, p) for p in (x_path, y_path, z_path))
    if not xp.domain == yp.domain == zp.domain:
        raise AffineError("paths must share a domain")
    n, m, k = xp.length, yp.length, zp.length
    w = [[[None] * (k + 1) for _ in range(m + 1)] for _ in range(n + 1)]
    xy = grid2(conn, yp, xp).u
    xz = grid2(conn, zp, xp).u
    yz = grid2(conn, zp, yp).u
    for i in range(n + 1):
        for j in range(m + 1):
            w[i][j][0] = xy[i][j]
        for l in range(k + 1):
            w[i][0][l] = xz[i][l]
    for j in range(m + 1):
        for l in range(k + 1):
            w[0][j][l] = yz[j][l]
    for i in range(n):
        for j in range(m):
            for l in range(k):
                rep = cube_check(conn, w[i][j][l], w[i + 1][j][l], w[i][j + 1][l], w[i][j][l + 1])
                if rep.cube is None:
                    raise AffineError(f"cube lemma fails in cell {(i, j, l)}: {rep.violations}")
                w[i + 1][j + 1][l + 1] = rep.cube[7]
    return Grid3D(tuple(tuple(tuple(r) for r in plane) for plane in w), xp, yp, zp)


# ---------------------------------------------------------------- heaps


class HeapError(AffineError):
    pass


class Heap:
    """Extended ternary operation and the groups ``(M, +_o)`` of a flat symmetric connection.

    ``ext(z, x, y)`` is the codomain of the grid spanned by the breadth-first
    paths ``x -> y`` and ``x -> z``; ``add(o, x, y) = ext(x, o, y)``.
    """

    def __init__(self, conn: AffineConnection, check: bool = True):
        if check:
            if not conn.symmetric:
                raise HeapError("heap extraction needs a symmetric connection")
            wf = weak_flatness_check(conn)
            if not wf.ok:
                raise HeapError(f"connection is not weakly flat, e.g. at {wf.violations[0]}")
        self.conn = conn
        self.space = conn.space
        self._paths: dict = {}

    def path(self, x, y) -> NPath:
        tree = self._paths.get(x)
        if tree is None:
            tree = self._paths[x] = self.space.bfs_tree(x)
        if y not in tree:
            raise HeapError(f"{x!r} and {y!r} lie in different components")
        return self.space.tree_path(tree, y)

    def ext(self, z, x, y):
        return grid2(self.conn, self.path(x, y), self.path(x, z)).codomain

    def add(self, o, x, y):
        return self.ext(x, o, y)

    def inverse(self, o, x):
        return self.ext(o, x, o)

    def base_change(self, o, o2, x):
        return self.ext(x, o, o2)

    def table(self, o) -> dict:
        comp = self.space.infinity_monad(o)
        return {(x, y): self.add(o, x, y) for x in comp for y in comp}


def heap_add(conn: AffineConnection, o, x, y):
    return Heap(conn, check=False).add(o, x, y)


def heap_inverse(conn: AffineConnection, o, x):
    return Heap(conn, check=False).inverse(o, x)


def base_change(conn: AffineConnection, o, o2, x):
    return Heap(conn, check=False).base_change(o, o2, x)


def heap_suite(conn: AffineConnection, exhaustive_limit: int = 30, samples: int = 200, seed: int = 0) -> CheckReport:
    """Abelian-group laws of ``+_o``, affine compatibility and base change.

    Exhaustive on spaces with at most ``exhaustive_limit`` vertices; otherwise
    ``samples`` seeded random instances per law.
    """
    sp = conn.space
    if not sp.is_connected():
        return CheckReport(reason="space is not path connected")
    ax = validate_axioms(conn)
    if not ax.ok:
        return CheckReport(reason=f"axioms fail: {ax.violations[0]}")
    try:
        heap = Heap(conn)
    except HeapError as exc:
        return CheckReport(reason=str(exc))
    V = sp.vertices
    exhaustive = len(V) <= exhaustive_limit
    rng = random.Random(seed)
    bad: list = []

    if exhaustive:
        bases = list(V)
        tables = {o: heap.table(o) for o in V}
        add = lambda o, x, y: tables[o][(x, y)]
        triples = lambda: product(V, V, V)
        pairs = lambda: product(V, V)
    else:
        bases = rng.sample(list(V), min(len(V), 5))
        add = heap.add
        triples = lambda: [tuple(rng.choice(V) for _ in range(3)) for _ in range(samples)]
        pairs = lambda: [tuple(rng.choice(V) for _ in range(2)) for _ in range(samples)]

    inv = {}
    for o in bases:
        for x, y in pairs():
            if add(o, x, y) != add(o, y, x):
                bad.append(("commutativity", o, x, y))
        for x in (V if exhaustive else [rng.choice(V) for _ in range(samples)]):
            if add(o, o, x) != x or add(o, x, o) != x:
                bad.append(("unit", o, x))
            inv[(o, x)] = heap.inverse(o, x)
            if add(o, x, inv[(o, x)]) != o:
                bad.append(("inverse", o, x))
        for x, y, z in triples():
            if add(o, add(o, x, y), z) != add(o, x, add(o, y, z)):
                bad.append(("associativity", o, x, y, z))
        # [zxy] = z - x + y in the coordinates of (M, +_o)
        for z, x, y in conn.admissible():
            if (o, x) not in inv:
                inv[(o, x)] = heap.inverse(o, x)
            if add(o, add(o, z, inv[(o, x)]), y) != conn(z, x, y):
                bad.append(("affine", o, z, x, y))
    for z, x, y in conn.admissible():
        if heap.ext(z, x, y) != conn(z, x, y):
            bad.append(("extension", z, x, y))
    # cancellation [[xoy]y[yoz]] on a sample
    for o, x, y, z in [tuple(rng.choice(V) for _ in range(4)) for _ in range(min(samples, 50))]:
        mid = heap.ext(add(o, x, y), y, add(o, y, z))
        if not mid == add(o, add(o, x, y), z) == add(o, x, add(o, y, z)):
            bad.append(("cancellation", o, x, y, z))
    for o in bases:
        for o2 in bases:
            f = {x: heap.base_change(o, o2, x) for x in V}
            if len(set(f.values())) != len(V):
                bad.append(("base-change bijective", o, o2))
                continue
            for x, y in pairs():
                if f[add(o, x, y)] != add(o2, f[x], f[y]):
                    bad.append(("base-change homomorphism", o, o2, x, y))
    return CheckReport(violations=bad, value={"exhaustive": exhaustive, "seed": seed, "bases": len(bases)})
