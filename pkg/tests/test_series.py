import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncalc.fixtures import random_psi, random_series
from ncalc.series import (
    BlockSpec,
    Series,
    SeriesError,
    compositional_inverse,
    normalize_eps,
    point_var,
    vcompose,
    veq,
)

B2 = BlockSpec(2)
P2 = BlockSpec.make(2, 2, [(0, 1)])
seeds = st.integers(0, 100_000)


def rs(seed, spec=B2, order=4):
    return random_series(random.Random(seed), spec, order)


def test_square_zero_within_block():
    e = Series.eps(BlockSpec(2, 1), 0, 0)
    f = Series.eps(BlockSpec(2, 1), 0, 1)
    assert (e * e).is_zero() and (e * f).is_zero()


def test_pair_relation_normal_form():
    e0a, e0b = Series.eps(P2, 0, 0), Series.eps(P2, 0, 1)
    e1a, e1b = Series.eps(P2, 1, 0), Series.eps(P2, 1, 1)
    assert (e0a * e1b + e0b * e1a).is_zero()
    assert (e0a * e1a).is_zero()
    assert normalize_eps(P2, ((0, 1), (1, 0))) == (-1, ((0, 0), (1, 1)))
    # without the pair, the two products are independent
    U = BlockSpec(2, 2)
    assert not (Series.eps(U, 0, 0) * Series.eps(U, 1, 1) + Series.eps(U, 0, 1) * Series.eps(U, 1, 0)).is_zero()


def test_block_spec_validation_and_json():
    with pytest.raises(SeriesError):
        BlockSpec.make(2, 1, [(0, 1)])
    assert P2.to_json() == [{"pairs_with": [1]}, {"pairs_with": [0]}]


def test_precision_tracking():
    x = Series.var(B2, 0, 4)
    assert (x * x).order == 4
    one_plus = Series.const(B2, 1, 4) + x
    assert (one_plus * one_plus).order == 4
    assert x.derivative(0).order == 3
    assert Series.zero(B2, 5).valuation >= 5
    with pytest.raises(SeriesError):
        x.with_order(6)


def test_equality_at_common_order():
    a = Series.var(B2, 0, 2)
    b = Series.var(B2, 0, 5) + Series.monomial(B2, (3, 0), order=5)
    assert a == b
    assert not a.with_order(2) == Series.var(B2, 1, 2)


def test_rejects_floats():
    with pytest.raises(SeriesError):
        Series.const(B2, 0.5)


def test_taylor_shift_first_order():
    spec = BlockSpec(2, 1)
    F = Series.monomial(spec, (2, 1), order=5)  # x0^2 x1
    d = F.taylor_shift(0) - F
    assert d.eps_part(((0, 0),)) == Series.monomial(B2, (1, 1), coef=2, order=4)
    assert d.eps_part(((0, 1),)) == Series.monomial(B2, (2, 0), order=4)


def test_json_rejects_bad_input():
    with pytest.raises(SeriesError):
        Series.from_json({"vars": 2, "order": 3, "terms": [{"exp": [0, 0], "coef": 0.5}]})
    with pytest.raises(SeriesError):
        Series.from_json({"vars": 2})
    with pytest.raises(SeriesError):
        Series.from_json({"vars": 2, "order": 3, "blocks": [{"pairs_with": [1]}, {}], "terms": []})


def test_compose_rejects_constant_term():
    with pytest.raises(SeriesError):
        Series.var(B2, 0).compose([Series.const(B2, 1), Series.var(B2, 1)])


@settings(max_examples=40, deadline=None)
@given(seeds, seeds, seeds)
def test_ring_axioms(s1, s2, s3):
    a, b, c = rs(s1), rs(s2), rs(s3)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a - a).is_zero()


@settings(max_examples=40, deadline=None)
@given(seeds, seeds, st.integers(0, 1))
def test_leibniz_rule(s1, s2, v):
    a, b = rs(s1), rs(s2)
    assert (a * b).derivative(v) == a.derivative(v) * b + a * b.derivative(v)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_json_roundtrip(seed):
    rng = random.Random(seed)
    s = random_series(rng, P2, 4) + Series.eps(P2, 0, 1, 4) * random_series(rng, P2, 4)
    back = Series.from_json(s.to_json())
    assert back.terms == s.terms and back.order == s.order and back.spec == s.spec


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_compositional_inverse(seed):
    psi = random_psi(random.Random(seed), 2, 5)
    inv = compositional_inverse(psi)
    x = point_var(B2, 5)
    assert veq(vcompose(psi, inv), x) and veq(vcompose(inv, psi), x)


@settings(max_examples=20, deadline=None)
@given(seeds, seeds)
def test_chain_rule(s1, s2):
    F = rs(s1, order=4)
    psi = random_psi(random.Random(s2), 2, 4)
    lhs = F.compose(psi).derivative(0)
    rhs = sum((F.derivative(a).compose(psi) * psi[a].derivative(0) for a in range(2)), Series.zero(B2, 4))
    assert lhs == rhs


def test_pow_and_scale():
    x = Series.var(B2, 0, 6)
    assert (1 + x) ** 2 == 1 + x.scale(2) + x * x
    assert x.scale(Fraction(1, 2)).terms[((1, 0), ())] == Fraction(1, 2)
