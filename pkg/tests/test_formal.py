import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncalc.fixtures import (
    nonclosed_omega,
    nonflat_gamma,
    pullback_fixture,
    random_omega,
    random_psi,
    random_symmetric_gamma,
    random_unit_map,
)
from ncalc.formal import (
    ChristoffelField,
    FormalChart,
    FormalError,
    ObstructionError,
    affine_flatness_residual,
    basicx_verify,
    closedness_residual,
    closedness_residual_pairs,
    compose_maps,
    cube_check,
    curvature_tensor,
    flatness_report,
    formal_chart,
    formal_primitive,
    grid_vs_chart,
    heap_inverse_via_chart,
    heap_via_chart,
    identity_map,
    is_closed,
    lambda_coord,
    maurer_cartan_from_map,
    pullback_connection,
    second_order_scalar_verify,
    symmetry_check,
    torsion,
    trivialization_residual,
)
from ncalc.matrix import MatrixSeries
from ncalc.series import BlockSpec, Series, point_block, point_var, vadd, veq

B2 = BlockSpec(2)
seeds = st.integers(0, 100_000)


# ------------------------------------------------------------ 1-forms


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_basic_identity_holds_for_any_form(seed):
    assert basicx_verify(random_omega(random.Random(seed), 2, 2, 3)).is_zero()


def test_basic_identity_needs_enough_precision():
    with pytest.raises(FormalError):
        basicx_verify(random_omega(random.Random(0), 2, 2, 3), 5)


def test_commutator_form_residual_is_diag():
    res = closedness_residual(nonclosed_omega())
    want = MatrixSeries.constant(B2, [[1, 0], [0, -1]], 3)
    assert list(res) == [(0, 1)]
    assert res[(0, 1)] == want
    assert closedness_residual_pairs(nonclosed_omega())[(0, 1)] == want
    assert is_closed(nonclosed_omega()).violations == [(0, 1)]


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_routes_agree_on_random_forms(seed):
    w = random_omega(random.Random(seed), 2, 2, 3)
    t, p = closedness_residual(w), closedness_residual_pairs(w)
    assert all(t[k] == p[k] for k in t)


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_maurer_cartan_forms_are_closed_and_integrate_back(seed):
    f0 = random_unit_map(random.Random(seed), 2, 2, 4)
    w = maurer_cartan_from_map(f0)
    assert is_closed(w).ok
    f = formal_primitive(w, 4)
    assert f == f0 and f.order == 4


def test_primitive_obstruction_degree():
    with pytest.raises(ObstructionError) as exc:
        formal_primitive(nonclosed_omega(), 3)
    assert exc.value.degree == 1 and exc.value.component == (0, 1)


def test_primitive_of_zero_form_is_identity():
    from ncalc.formal import CoordOneForm

    f = formal_primitive(CoordOneForm.zero(2, 3, 4), 5)
    assert f == MatrixSeries.identity(B2, 3, 5)


def test_maurer_cartan_needs_base_series():
    with pytest.raises(FormalError):
        maurer_cartan_from_map(MatrixSeries.identity(BlockSpec(2, 1), 2, 3))


# ------------------------------------------------------------ Christoffel fields


def test_lambda_of_zero_gamma_is_affine():
    spec = BlockSpec(2, 2)
    x = point_var(spec, 4)
    z, y = vadd(x, point_block(spec, 0, 4)), vadd(x, point_block(spec, 1, 4))
    out = lambda_coord(ChristoffelField.zero(2, 4), x, z, y)
    assert veq(out, vadd(z, y, [-s for s in x]))


def test_torsion_and_symmetry():
    g = {(0, 0, 1): Series.const(B2, 1, 3)}
    G = ChristoffelField(2, 3, g)
    assert set(torsion(G)) == {(0, 0, 1), (0, 1, 0)}
    assert symmetry_check(G).violations == [(0, 0, 1)]
    with pytest.raises(FormalError):
        second_order_scalar_verify(G, 2)
    with pytest.raises(FormalError):
        formal_chart(G, 4)


def test_christoffel_validation():
    with pytest.raises(FormalError):
        ChristoffelField(2, 3, {(0, 0, 2): Series.const(B2, 1, 3)})
    with pytest.raises(FormalError):
        ChristoffelField(2, 5, {(0, 0, 0): Series.const(B2, 1, 3)})


def test_nonflat_constant_gamma():
    G = nonflat_gamma(3)
    R = curvature_tensor(G)
    assert R
    assert not flatness_report(G).ok
    assert not cube_check(G).ok
    with pytest.raises(ObstructionError) as exc:
        formal_chart(G, 5)
    assert exc.value.degree == 0


@settings(max_examples=8, deadline=None)
@given(seeds)
def test_residual_coefficients_are_curvature(seed):
    G = random_symmetric_gamma(random.Random(seed), 2, 2)
    res = affine_flatness_residual(G)
    R = curvature_tensor(G)
    zero = Series.zero(B2, G.order - 1)
    for d, c, a, b in product(range(2), repeat=4):
        coef = res[d].eps_part(((0, a), (1, b), (2, c))).truncate(G.order - 1)
        assert coef == R.get((d, c, a, b), zero)


@settings(max_examples=8, deadline=None)
@given(seeds, st.sampled_from([Fraction(1, 2), Fraction(2), Fraction(-1), Fraction(3, 7)]))
def test_second_order_scalar_law(seed, t):
    assert second_order_scalar_verify(random_symmetric_gamma(random.Random(seed), 2, 3), t).ok


# ------------------------------------------------------------ maps and charts


def test_pullback_along_identity_is_trivial():
    G = random_symmetric_gamma(random.Random(1), 2, 3)
    assert pullback_connection(identity_map(2, 5), G) == G


def test_pullback_rejects_unnormalized_map():
    psi = [Series.var(B2, 0, 4).scale(2), Series.var(B2, 1, 4)]
    with pytest.raises(FormalError):
        pullback_connection(psi, ChristoffelField.zero(2, 4))


@settings(max_examples=5, deadline=None)
@given(seeds, seeds)
def test_double_pullback(s1, s2):
    G = random_symmetric_gamma(random.Random(s1), 2, 3)
    rng = random.Random(s2)
    p1, p2 = random_psi(rng, 2, 5), random_psi(rng, 2, 5)
    lhs = pullback_connection(p2, pullback_connection(p1, G))
    rhs = pullback_connection(compose_maps(p1, p2), G)
    assert lhs == rhs


@settings(max_examples=5, deadline=None)
@given(seeds)
def test_pullback_of_flat_is_flat(seed):
    psi, G = pullback_fixture(seed, 2, 5)
    assert symmetry_check(G).ok
    assert flatness_report(G).ok and not curvature_tensor(G)
    assert cube_check(G).ok


@settings(max_examples=5, deadline=None)
@given(seeds)
def test_chart_recovers_psi(seed):
    psi, G = pullback_fixture(seed, 2, 5)
    chart = formal_chart(G, 5)
    assert veq(chart.components, psi)
    assert all(s.is_zero() for s in trivialization_residual(chart, G))
    grid, heap = grid_vs_chart(chart, G)
    assert veq(grid, heap)


def test_chart_three_dimensional():
    psi, G = pullback_fixture(3, 3, 4)
    assert veq(formal_chart(G, 4).components, psi)


def test_chart_heap_laws():
    psi, G = pullback_fixture(2, 2, 5)
    chart = formal_chart(G, 5)
    spec = BlockSpec(2, 2)
    o = point_block(spec, 0, 5)
    x = vadd(point_var(spec, 5), point_block(spec, 1, 5))
    assert veq(heap_via_chart(chart, o, x, o), x)
    assert veq(heap_via_chart(chart, o, o, x), x)
    inv = heap_inverse_via_chart(chart, o, x)
    assert veq(heap_via_chart(chart, o, inv, x), o)


def test_chart_rejects_bad_components():
    with pytest.raises(FormalError):
        FormalChart([Series.var(B2, 0, 3) + 1, Series.var(B2, 1, 3)])
