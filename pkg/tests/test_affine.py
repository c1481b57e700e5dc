import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncalc.affine import (
    CUBE_EQUATIONS,
    AffineError,
    Heap,
    HeapError,
    NotAdmissible,
    TotalityError,
    base_change,
    cube_check,
    cube_check_all,
    grid2,
    grid2_codomain_invariance,
    grid3,
    hat,
    heap_add,
    heap_inverse,
    heap_suite,
    lattice_connection,
    sheared_connection,
    table_connection,
    twisted_connection,
    validate_axioms,
    weak_flatness_check,
)
from ncalc.fixtures import corrupted_lattice_table
from ncalc.groupoid import inverse_law, is_flat
from ncalc.space import NeighborSpace

L5 = lattice_connection(5)
T5 = twisted_connection(5, seed=11)


def _add(a, b, m=5):
    return ",".join(str((int(p) + int(q)) % m) for p, q in zip(a.split(","), b.split(",")))


def test_lattice_values():
    assert L5("0,1", "0,0", "1,0") == "1,1"
    assert L5("0,0", "0,0", "1,0") == "1,0"
    with pytest.raises(NotAdmissible):
        L5("2,2", "0,0", "1,0")


@pytest.mark.parametrize("conn", [L5, T5, sheared_connection()], ids=lambda c: c.name)
def test_axioms_hold_for_generators(conn):
    rep = validate_axioms(conn)
    assert rep.ok and rep.symmetric and conn.symmetric


def test_corrupted_table_names_axiom():
    sp, entries = corrupted_lattice_table()
    rep = validate_axioms(table_connection(sp, entries))
    assert not rep.ok
    names = {name for name, _t in rep.violations}
    assert names & {"book-keeping", "unit [zxx]=z", "unit [xxy]=y", "inversion"}
    assert any(t == ("0,1", "0,0", "1,0") for _n, t in rep.violations)


def test_partial_table_raises_totality():
    sp = NeighborSpace(["a", "b"], [("a", "b")])
    conn = table_connection(sp, {("a", "a", "a"): "a"})
    with pytest.raises(TotalityError) as exc:
        validate_axioms(conn)
    assert len(exc.value.triple) == 3
    with pytest.raises(NotAdmissible):
        table_connection(NeighborSpace(["a", "b"]), {("a", "a", "b"): "a"})


def test_hat_is_flat_exactly_for_flat_tables():
    assert weak_flatness_check(L5).ok and weak_flatness_check(T5).ok
    assert is_flat(hat(L5)).ok and inverse_law(hat(L5)).ok
    rep = weak_flatness_check(sheared_connection())
    assert not rep.ok and len(rep.violations) == 9216


def test_grid2_lattice_codomain_and_transpose():
    g = grid2(L5, ["0,0", "1,0", "2,0"], ["0,0", "0,1"])
    assert g.domain == "0,0" and g.codomain == "2,1"
    gt = grid2(L5, ["0,0", "0,1"], ["0,0", "1,0", "2,0"])
    assert gt.u == g.transpose()
    with pytest.raises(AffineError):
        grid2(L5, ["0,0"], ["1,1"])


def test_grid2_codomain_invariance():
    assert grid2_codomain_invariance(L5, "0,0", "2,0", "0,2", 3).value == "2,2"
    assert grid2_codomain_invariance(T5, T5.space.vertices[0], T5.space.vertices[0], T5.space.vertices[0], 2).ok
    sh = sheared_connection()
    rep = grid2_codomain_invariance(sh, "0,0,0,0", "1,0,0,0", "0,1,0,0", 2)
    assert rep.witness is not None


def test_cube_lemma_flat_and_sheared():
    rep = cube_check(L5, "0,0", "1,0", "0,1", "4,0")
    assert rep.ok and rep.cube[7] == "0,1" and set(rep.cube) == set(range(8))
    assert len(CUBE_EQUATIONS) == 3
    bad = cube_check_all(sheared_connection())
    assert not bad.ok
    _quad, eqs = bad.violations[0]
    assert eqs and all("=" in e for e in eqs)


def test_grid3_codomain_and_faces():
    g = grid3(L5, ["0,0", "1,0"], ["0,0", "0,1"], ["0,0", "4,0"])
    assert g.codomain == "0,1"
    xy = g.face("xy")
    # rows follow the x path, columns the y path
    assert xy == grid2(L5, ["0,0", "0,1"], ["0,0", "1,0"]).u
    with pytest.raises(ValueError):
        g.face("xx")


def test_heap_on_lattice_is_translation_group():
    h = Heap(L5)
    o = "0,0"
    for x in L5.space.vertices:
        for y in ("1,2", "4,4"):
            assert h.add(o, x, y) == _add(x, y)
        assert _add(h.inverse(o, x), x) == "0,0"
    assert heap_add(L5, "1,1", "2,2", "3,3") == "4,4"
    assert heap_inverse(L5, "1,1", "2,2") == "0,0"
    assert base_change(L5, "0,0", "1,0", "2,2") == "3,2"


def test_heap_refuses_curved_connection():
    with pytest.raises(HeapError):
        Heap(sheared_connection())
    assert heap_suite(sheared_connection()).outcome == "untestable"


@pytest.mark.parametrize("conn", [lattice_connection(3), twisted_connection(3, seed=2)], ids=lambda c: c.name)
def test_heap_suite_exhaustive_small(conn):
    rep = heap_suite(conn)
    assert rep.ok and rep.value["exhaustive"]


def test_heap_suite_disconnected_untestable():
    sp = NeighborSpace(["a", "b"])
    conn = table_connection(sp, {("a", "a", "a"): "a", ("b", "b", "b"): "b"})
    assert heap_suite(conn).outcome == "untestable"


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_twisted_connections_flat_for_any_permutation(seed):
    conn = twisted_connection(3, seed=seed)
    assert validate_axioms(conn).ok
    assert weak_flatness_check(conn).ok
    assert cube_check_all(conn).ok
