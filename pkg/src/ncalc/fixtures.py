"""Seeded generators for test and demo inputs.

``python -m ncalc.fixtures DIR`` writes the shipped fixture files.
"""
from __future__ import annotations

import random
import sys
from fractions import Fraction
from itertools import product
from pathlib import Path

from .affine import lattice_connection
from .formal import ChristoffelField, CoordOneForm, pullback_connection
from .forms import OneForm, make_coboundary
from .groups import CyclicGroup, GroupOps, MatrixGroup, SymmetricGroup
from .matrix import MatrixSeries
from .series import BlockSpec, Series
from .space import NeighborSpace

# ------------------------------------------------------------------ discrete


def triangle_rich_graph(rng: random.Random, n: int) -> NeighborSpace:
    """Strip-like random graph: each new vertex attaches near the end and often closes a triangle.

    Degrees stay small, so bounded path enumeration remains cheap, and a few
    vertices may start a fresh component.
    """
    verts = [f"v{i}" for i in range(n)]
    edges = []
    adj = {v: set() for v in verts}
    for i in range(1, n):
        if rng.random() < 0.05:
            continue
        j = rng.randrange(max(0, i - 3), i)
        a, b = verts[i], verts[j]
        edges.append((a, b))
        adj[a].add(b)
        adj[b].add(a)
        older = sorted(w for w in adj[b] if w != a)
        if older and rng.random() < 0.7:
            k = rng.choice(older)
            edges.append((a, k))
            adj[a].add(k)
            adj[k].add(a)
    return NeighborSpace(verts, edges)


def random_group(rng: random.Random) -> GroupOps:
    return rng.choice([SymmetricGroup(4), CyclicGroup(12), MatrixGroup(5)])


def coboundary_fixture(seed: int, max_vertices: int = 40):
    """``(space, group, f, df)`` for a seeded triangle-rich graph."""
    rng = random.Random(seed)
    space = triangle_rich_graph(rng, rng.randint(3, max_vertices))
    group = random_group(rng)
    f = {v: group.random_element(rng) for v in space.vertices}
    return space, group, f, make_coboundary(space, group, f)


def triangle_space() -> NeighborSpace:
    return NeighborSpace(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")])


def cycle4_space() -> NeighborSpace:
    return NeighborSpace(["a", "b", "c", "d"], [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])


def holonomy_form() -> OneForm:
    """Z_3 on the 4-cycle with every edge ``a->b->c->d->a`` labelled 1."""
    sp = cycle4_space()
    return OneForm(sp, CyclicGroup(3), {("a", "b"): 1, ("b", "c"): 1, ("c", "d"): 1, ("d", "a"): 1})


def s3_triangle_coboundary() -> OneForm:
    S3 = SymmetricGroup(3)
    f = {"a": S3.identity(), "b": S3.cycle(3, (0, 1)), "c": S3.cycle(3, (0, 1, 2))}
    return make_coboundary(triangle_space(), S3, f)


def corrupted_lattice_table(modulus: int = 3):
    """Entries of the ``Z_m^2`` lattice table with ``[0,1 | 0,0 | 1,0]`` changed to ``0,0``."""
    conn = lattice_connection(modulus, 2)
    entries = dict(conn.table)
    entries[("0,1", "0,0", "1,0")] = "0,0"
    return conn.space, entries


# ------------------------------------------------------------------ jets


def random_series(rng: random.Random, spec: BlockSpec, order: int, mindeg: int = 0,
                  density: float = 0.5, span: int = 3) -> Series:
    terms = {}
    for e in product(range(order + 1), repeat=spec.nvars):
        if mindeg <= sum(e) <= order and rng.random() < density:
            terms[(e, ())] = Fraction(rng.randint(-span, span), rng.randint(1, 2))
    return Series(spec, terms, order)


def random_omega(rng: random.Random, dim: int = 2, size: int = 2, order: int = 4) -> CoordOneForm:
    spec = BlockSpec(dim)
    return CoordOneForm([
        MatrixSeries([[random_series(rng, spec, order) for _ in range(size)] for _ in range(size)])
        for _ in range(dim)
    ])


def random_unit_map(rng: random.Random, dim: int = 2, size: int = 2, order: int = 5) -> MatrixSeries:
    """Matrix series with ``f(0) = 1``."""
    spec = BlockSpec(dim)
    return MatrixSeries([
        [random_series(rng, spec, order, mindeg=1, density=0.4) + int(i == j) for j in range(size)]
        for i in range(size)
    ])


def nonclosed_omega(order: int = 4) -> CoordOneForm:
    """``Omega_1 = E12``, ``Omega_2 = E21`` (constant)."""
    spec = BlockSpec(2)
    E12 = MatrixSeries.constant(spec, [[0, 1], [0, 0]], order)
    E21 = MatrixSeries.constant(spec, [[0, 0], [1, 0]], order)
    return CoordOneForm([E12, E21])


def random_psi(rng: random.Random, dim: int = 2, order: int = 6, density: float = 0.35) -> list[Series]:
    """Formal diffeomorphism with zero constant term and identity linear part."""
    spec = BlockSpec(dim)
    return [Series.var(spec, c, order) + random_series(rng, spec, order, mindeg=2, density=density, span=2)
            for c in range(dim)]


def random_symmetric_gamma(rng: random.Random, dim: int = 2, order: int = 4, density: float = 0.4) -> ChristoffelField:
    spec = BlockSpec(dim)
    g = {}
    for c in range(dim):
        for a in range(dim):
            for b in range(a, dim):
                g[(c, a, b)] = g[(c, b, a)] = random_series(rng, spec, order, density=density)
    return ChristoffelField(dim, order, g)


def pullback_fixture(seed: int, dim: int = 2, order: int = 6):
    """``(psi, Gamma)`` with ``Gamma`` the pullback of the flat connection along ``psi``."""
    rng = random.Random(seed)
    psi = random_psi(rng, dim, order)
    return psi, pullback_connection(psi, ChristoffelField.zero(dim, order))


def nonflat_gamma(order: int = 4) -> ChristoffelField:
    """Constant ``G^c_ab = [c = a][b = 0] + [c = b][a = 0]`` in two dimensions (curved)."""
    spec = BlockSpec(2)
    g = {}
    for c, a, b in product(range(2), repeat=3):
        v = int(c == a and b == 0) + int(c == b and a == 0)
        if v:
            g[(c, a, b)] = Series.const(spec, v, order)
    return ChristoffelField(2, order, g)


def gamma_corpus(seed: int = 0, size: int = 30) -> list[ChristoffelField]:
    """Mixed flat and curved symmetric fields (flat ones are pullbacks of 0 or of a flat pullback)."""
    rng = random.Random(seed)
    out = [ChristoffelField.zero(2, 4), nonflat_gamma(4)]
    while len(out) < size:
        kind = len(out) % 3
        if kind == 0:
            out.append(pullback_connection(random_psi(rng, 2, 6), ChristoffelField.zero(2, 6)))
        elif kind == 1:
            out.append(random_symmetric_gamma(rng, 2, 3))
        else:
            dim = rng.choice([2, 3])
            out.append(pullback_connection(random_psi(rng, dim, 5, density=0.2), ChristoffelField.zero(dim, 5)))
    return out


# ------------------------------------------------------------------ writer


def write_all(outdir: str | Path) -> list[Path]:
    from . import io

    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    files = {}
    files["triangle.json"] = io.space_to_json(triangle_space())
    files["disjoint_edges.json"] = {"vertices": ["a", "b", "c", "d"], "edges": [["a", "b"], ["c", "d"]]}
    files["malformed_space.json"] = {"vertices": ["a", "b", "c"], "edges": [["a", "b"], ["b"], ["c", "a"]]}
    files["one_point.json"] = {"vertices": ["a"], "edges": []}
    files["empty_form.json"] = {"group": {"kind": "cyclic", "modulus": 5}, "values": {}}
    files["cycle4.json"] = io.space_to_json(cycle4_space())
    files["holonomy_form.json"] = io.form_to_json(holonomy_form())
    files["s3_coboundary_form.json"] = io.form_to_json(s3_triangle_coboundary())
    sp, _g, _f, w = coboundary_fixture(7)
    files["coboundary_space.json"] = io.space_to_json(sp)
    files["coboundary_form.json"] = io.form_to_json(w)
    files["lattice5.json"] = {"kind": "lattice", "modulus": 5, "dim": 2}
    rng = random.Random(11)
    perm = list(range(25))
    rng.shuffle(perm)
    files["twisted5.json"] = {"kind": "twisted", "modulus": 5, "dim": 2, "perm": perm}
    files["sheared.json"] = {"kind": "sheared", "modulus": 3, "fiber": 2}
    csp, entries = corrupted_lattice_table(3)
    files["lattice3_space.json"] = io.space_to_json(csp)
    files["corrupted_table.json"] = {
        "kind": "table",
        "space": "lattice3_space.json",
        "entries": {"|".join(k): v for k, v in sorted(entries.items())},
    }
    files["omega_random.json"] = io.omega_to_json(random_omega(random.Random(3), 2, 2, 4))
    from .formal import maurer_cartan_from_map

    f0 = random_unit_map(random.Random(5), 2, 2, 5)
    files["map_f.json"] = io.matrix_map_to_json(f0)
    files["omega_closed.json"] = io.omega_to_json(maurer_cartan_from_map(f0))
    files["omega_nonclosed.json"] = io.omega_to_json(nonclosed_omega(4))
    psi, gamma = pullback_fixture(1)
    files["psi.json"] = io.map_to_json(psi)
    files["gamma_pullback.json"] = io.gamma_to_json(gamma)
    files["gamma_nonflat.json"] = io.gamma_to_json(nonflat_gamma(4))
    files["gamma_zero.json"] = io.gamma_to_json(ChristoffelField.zero(2, 4))
    written = []
    for name, data in sorted(files.items()):
        p = out / name
        p.write_text(io.canonical(data))
        written.append(p)
    return written


if __name__ == "__main__":  # pragma: no cover
    for p in write_all(sys.argv[1] if len(sys.argv) > 1 else "fixtures"):
        print(p)
