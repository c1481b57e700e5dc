import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncalc.fixtures import (
    coboundary_fixture,
    cycle4_space,
    holonomy_form,
    s3_triangle_coboundary,
    triangle_space,
)
from ncalc.forms import (
    FormError,
    OneForm,
    PrimitiveConflict,
    derivative_of,
    is_closed,
    mutual_triples,
    path_independence_check,
    path_integral,
    primitive,
    quadrangle_defect,
    quadrangle_report,
)
from ncalc.groups import CyclicGroup, SymmetricGroup
from ncalc.space import NeighborSpace, NPath


def test_missing_edges_are_identity_and_orientation_is_inverse():
    Z5 = CyclicGroup(5)
    w = OneForm(triangle_space(), Z5, {("a", "b"): 2})
    assert w("a", "b") == 2 and w("b", "a") == 3
    assert w("a", "c") == 0 and w("c", "c") == 0


def test_form_rejects_non_neighbours_and_bad_diagonal():
    Z5 = CyclicGroup(5)
    sp = NeighborSpace(["a", "b", "c"], [("a", "b")])
    with pytest.raises(FormError):
        OneForm(sp, Z5, {("a", "c"): 1})
    with pytest.raises(FormError):
        OneForm(sp, Z5, {("a", "a"): 1})
    with pytest.raises(FormError):
        OneForm(sp, Z5, {("a", "b"): 1, ("b", "a"): 1})
    with pytest.raises(FormError):
        OneForm(sp, Z5, {})("a", "c")


def test_s3_coboundary_closed_and_primitive():
    w = s3_triangle_coboundary()
    assert list(mutual_triples(w.space)) == [("a", "b", "c")]
    assert is_closed(w).ok
    f = primitive(w, "a")
    assert f("a") == w.group.identity()
    assert derivative_of(f, w).ok


def test_nonclosed_triangle_reports_triple():
    w = OneForm(triangle_space(), CyclicGroup(3), {("a", "b"): 1})
    assert is_closed(w).violations == [("a", "b", "c")]
    with pytest.raises(PrimitiveConflict) as exc:
        primitive(w, "a")
    assert exc.value.edge in {("a", "b"), ("b", "c"), ("a", "c")}
    assert exc.value.expected != exc.value.found


def test_holonomy_quadrangle_defect():
    w = holonomy_form()
    # (a->b->c) gives 2, (a->d->c) gives 1 + 1^-1 ... defect = 2 - 1 = 1 in Z_3
    assert path_integral(w, NPath(("a", "b", "c"))) == 2
    assert path_integral(w, NPath(("a", "d", "c"))) == 1
    assert quadrangle_defect(w, "a", "b", "d", "c") == 1
    assert not quadrangle_report(w).ok
    assert is_closed(w).ok  # no triangles: vacuously closed


def test_quadrangle_defect_requires_neighbours():
    with pytest.raises(FormError):
        quadrangle_defect(holonomy_form(), "a", "c", "b", "d")


def test_holonomy_primitive_fails_and_path_witness():
    w = holonomy_form()
    with pytest.raises(PrimitiveConflict):
        primitive(w, "a")
    rep = path_independence_check(w, "a", "c", 2)
    (p0, v0), (p1, v1) = rep.witness
    assert p0.points == ("a", "b", "c") and p1.points == ("a", "d", "c")
    assert (v0, v1) == (2, 1)


def test_path_independence_unreachable():
    sp = NeighborSpace(["a", "b"])
    rep = path_independence_check(OneForm(sp, CyclicGroup(2)), "a", "b", 3)
    assert rep.outcome == "untestable"


def test_one_point_primitive():
    w = OneForm(NeighborSpace(["a"]), SymmetricGroup(3))
    assert primitive(w, "a").values == {"a": (0, 1, 2)}


def test_unknown_tree_kind():
    with pytest.raises(ValueError):
        primitive(s3_triangle_coboundary(), "a", tree="random")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_coboundary_primitive_is_normalized_f(seed):
    space, g, f, w = coboundary_fixture(seed, max_vertices=15)
    assert is_closed(w).ok and quadrangle_report(w).ok
    x0 = space.vertices[0]
    inv = g.invert(f[x0])
    want = {y: g.compose(inv, f[y]) for y in space.infinity_monad(x0)}
    assert primitive(w, x0, "bfs").values == want == primitive(w, x0, "dfs").values


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_path_integral_of_coboundary_telescopes(seed):
    space, g, f, w = coboundary_fixture(seed, max_vertices=12)
    rng = random.Random(seed)
    pts = [rng.choice(space.vertices)]
    for _ in range(6):
        pts.append(rng.choice(space.monad(pts[-1])))
    p = space.validate_path(pts)
    assert path_integral(w, p) == g.compose(g.invert(f[p.domain]), f[p.codomain])
