"""Acceptance criteria: one exact check per criterion, each with a wall-clock budget.

Run ``python tests/test_acceptance.py`` for a one-line-per-criterion summary;
under pytest each criterion is a test and the lines are repeated in the
terminal summary.
"""
from __future__ import annotations

import random
import sys
import time
from fractions import Fraction

import pytest

from ncalc import affine, formal, forms
from ncalc.fixtures import (
    coboundary_fixture,
    gamma_corpus,
    holonomy_form,
    nonclosed_omega,
    nonflat_gamma,
    pullback_fixture,
    random_omega,
    random_symmetric_gamma,
    random_unit_map,
)
from ncalc.series import veq


def _normalized(group, f, x0, component):
    inv = group.invert(f[x0])
    return {y: group.compose(inv, f[y]) for y in component}


def criterion_1():
    """Coboundary round-trip with uniqueness across BFS and DFS spanning trees."""
    for seed in range(50):
        space, group, f, w = coboundary_fixture(seed)
        x0 = random.Random(seed).choice(space.vertices)
        want = _normalized(group, f, x0, space.infinity_monad(x0))
        for tree in ("bfs", "dfs"):
            if forms.primitive(w, x0, tree=tree).values != want:
                return False, f"seed {seed}: {tree} primitive differs from f(x0)^-1 f"
    return True, "50 fixtures, both spanning trees exact"


def criterion_2():
    """Bounded path independence on the coboundary fixtures; witness on the Z_3 4-cycle."""
    checked = 0
    for seed in range(50):
        space, group, f, w = coboundary_fixture(seed)
        rng = random.Random(1000 + seed)
        pairs = []
        for x in space.vertices:
            dist = space.distances(x)
            pairs += [(x, y) for y, d in dist.items() if d <= 5]
        for x, y in rng.sample(pairs, min(20, len(pairs))):
            rep = forms.path_independence_check(w, x, y, 5)
            if not rep.ok or rep.value != group.compose(group.invert(f[x]), f[y]):
                return False, f"seed {seed}: {x}->{y} not path independent"
            checked += 1
    rep = forms.path_independence_check(holonomy_form(), "a", "c", 2)
    if rep.witness is None:
        return False, "holonomy 4-cycle gave no witness"
    (p0, v0), (p1, v1) = rep.witness
    if {v0, v1} != {1, 2}:
        return False, f"holonomy witness values {v0}, {v1}"
    return True, f"{checked} endpoint pairs agree; 4-cycle witness {p0.points} vs {p1.points}"


def criterion_3():
    """Cube lemma exhaustive on Z_5^2 and a twisted copy; named failures on the sheared table."""
    for conn in (affine.lattice_connection(5), affine.twisted_connection(5, seed=11)):
        rep = affine.cube_check_all(conn)
        if not rep.ok:
            return False, f"{conn.name}: {len(rep.violations)} failing quadruples"
    rep = affine.cube_check_all(affine.sheared_connection())
    if rep.ok or not all(eqs for _q, eqs in rep.violations):
        return False, "sheared connection shows no named cube failure"
    named = sorted({e for _q, es in rep.violations for e in es})
    return True, f"flat cases hold; sheared: {len(rep.violations)} quadruples fail ({len(named)} equations named)"


def criterion_4():
    """Heap theorems exhaustively on Z_3^2, Z_5^2 and twisted copies."""
    conns = [affine.lattice_connection(3), affine.lattice_connection(5),
             affine.twisted_connection(3, seed=4), affine.twisted_connection(5, seed=11)]
    for conn in conns:
        rep = affine.heap_suite(conn)
        if not rep.ok or not rep.value["exhaustive"]:
            return False, f"{conn.name}: {rep.reason or rep.violations[:1]}"
    return True, "group laws, [zxy] = z +_x y and base change hold on 4 connections"


def criterion_5():
    """Basic identity of the coordinate form holds exactly for random Omega."""
    rng = random.Random(5)
    for i in range(20):
        res = formal.basicx_verify(random_omega(rng, 2, 2, 4), 4)
        if not res.is_zero() or res.order < 4:
            return False, f"instance {i}: residual not identically zero"
    return True, "20 random Omega: residual exactly 0"


def criterion_6():
    """Closedness: Maurer-Cartan forms closed, E12/E21 not, both routes agree."""
    rng = random.Random(6)
    fixtures = [formal.maurer_cartan_from_map(random_unit_map(rng, 2, 2, 5)) for _ in range(10)]
    for i, w in enumerate(fixtures):
        if not formal.is_closed(w).ok:
            return False, f"Maurer-Cartan fixture {i} has nonzero residual"
    bad = nonclosed_omega()
    if formal.is_closed(bad).ok:
        return False, "E12/E21 residual vanished"
    for w in fixtures + [bad, random_omega(rng, 2, 2, 3)]:
        t, p = formal.closedness_residual(w), formal.closedness_residual_pairs(w)
        if any(not t[k].truncate(p[k].order) == p[k] for k in t):
            return False, "tensor and pair-relation routes disagree"
    return True, "10 closed, E12/E21 not closed, routes agree on 12 forms"


def criterion_7():
    """Formal primitive recovers f0 to order 5; non-closed input is obstructed."""
    rng = random.Random(7)
    for i in range(10):
        f0 = random_unit_map(rng, 2, 2, 5)
        f = formal.formal_primitive(formal.maurer_cartan_from_map(f0), 5)
        if not f == f0 or f.order < 5:
            return False, f"fixture {i}: primitive differs from f0"
    try:
        formal.formal_primitive(nonclosed_omega(), 4)
    except formal.ObstructionError as exc:
        if exc.degree != 1:
            return False, f"obstruction at degree {exc.degree}"
    else:
        return False, "no obstruction on E12/E21"
    return True, "10 round trips exact to order 5; obstruction at degree 1"


def criterion_8():
    """Second-order scalar law holds for symmetric Gamma."""
    rng = random.Random(8)
    for i in range(10):
        G = random_symmetric_gamma(rng, 2, 4)
        for t in (Fraction(1, 2), Fraction(2), Fraction(-1)):
            rep = formal.second_order_scalar_verify(G, t)
            if not rep.ok:
                return False, f"Gamma {i}, t={t}: residual or swap check failed"
    return True, "10 Gamma x 3 values of t: residual 0, symmetric in d1, d2"


def criterion_9():
    """Formal chart of a pulled-back flat connection recovers psi."""
    for seed in range(10):
        psi, G = pullback_fixture(seed, 2, 6)
        chart = formal.formal_chart(G, 6)
        if not veq(chart.components, psi) or chart.order < 6:
            return False, f"fixture {seed}: chart differs from psi"
        if not all(s.is_zero() for s in formal.trivialization_residual(chart, G)):
            return False, f"fixture {seed}: trivialization residual nonzero"
        grid, heap = formal.grid_vs_chart(chart, G)
        if not veq(grid, heap):
            return False, f"fixture {seed}: grid codomain differs from chart heap"
    try:
        formal.formal_chart(nonflat_gamma(4), 6)
    except formal.ObstructionError:
        pass
    else:
        return False, "curved Gamma produced a chart"
    return True, "10 charts recover psi to order 6; curved Gamma obstructed"


def criterion_10():
    """Flatness residual vanishes exactly when the curvature tensor does."""
    corpus = gamma_corpus(0, 30)
    flat = 0
    for i, G in enumerate(corpus):
        zero_res = all(s.is_zero() for s in formal.affine_flatness_residual(G))
        zero_curv = not formal.curvature_tensor(G)
        if zero_res != zero_curv:
            return False, f"instance {i}: residual and curvature disagree"
        flat += zero_res
    if not 0 < flat < len(corpus):
        return False, "corpus is not mixed"
    return True, f"{len(corpus)} instances ({flat} flat, {len(corpus) - flat} curved) agree"


CRITERIA = [
    (1, criterion_1, 10), (2, criterion_2, 30), (3, criterion_3, 30), (4, criterion_4, 60),
    (5, criterion_5, 10), (6, criterion_6, 10), (7, criterion_7, 10), (8, criterion_8, 10),
    (9, criterion_9, 30), (10, criterion_10, 10),
]


RESULT_LINES: list[str] = []


def run(num, fn, budget):
    t0 = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t0
    within = dt < budget
    status = "PASS" if ok and within else "FAIL"
    line = f"[{status}] criterion {num:>2}: {fn.__doc__.splitlines()[0] if fn.__doc__ else fn.__name__} -- {detail} ({dt:.2f}s / {budget}s)"
    return ok and within, line


@pytest.mark.parametrize("num,fn,budget", CRITERIA, ids=[f"criterion_{n}" for n, _f, _b in CRITERIA])
def test_criterion(num, fn, budget):
    ok, line = run(num, fn, budget)
    RESULT_LINES.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    results = [run(*c) for c in CRITERIA]
    for _ok, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _l in results) else 1)
