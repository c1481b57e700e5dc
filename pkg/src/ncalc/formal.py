"""Coordinate calculus on jets: matrix-valued forms, Christoffel fields and formal charts.

Points are lists of :class:`Series` (one per coordinate) in a common block
spec.  Fields (Omega, Gamma, charts) are series in the base variables only and
are evaluated at a point by substitution.

Conventions:
  * ``omega(x, x + d) = 1 + sum_a Omega_a(x) d_a``.
  * ``lambda_coord(G, x, z, y) = [z x y] = z - x + y + G(x; z - x, y - x)``
    with ``G(x; u, v)^c = sum_{a,b} G^c_{ab}(x) u_a v_b``.
  * Curvature ``R^d_{cab} = d_a G^d_{bc} - d_b G^d_{ac} - sum_e (G^e_{bc} G^d_{ae} - G^e_{ac} G^d_{be})``,
    which is exactly the coefficient of ``d1_a d2_b d3_c`` in the flatness
    residual ``[[z x0 x1] x1 [x1 x0 x2]] - [[z x0 x2] x2 [x2 x0 x1]]``.
  * A chart solves ``d_a d_b phi^c + sum_e d_e phi^c G^e_{ab} = 0``, i.e.
    ``phi([z x y]) = phi(z) - phi(x) + phi(y)`` on first-order arguments.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .matrix import MatrixSeries
from .report import CheckReport
from .series import (
    BlockSpec,
    Series,
    SeriesError,
    compositional_inverse,
    point_block,
    point_var,
    point_zero,
    vadd,
    vcompose,
    veq,
    vorder,
    vscale,
    vsub,
)


class FormalError(ValueError):
    pass


class ObstructionError(FormalError):
    """A degree-by-degree solver met an inconsistent integrability condition."""

    def __init__(self, what: str, degree: int, component: tuple, value):
        self.degree = degree
        self.component = component
        self.value = value
        super().__init__(f"{what} obstructed at degree {degree}, component {component}")


def _need(have: int, want: int, what: str):
    if have < want:
        raise FormalError(f"{what} is known to order {have}, order {want} is required")


def _is_var_point(p: Sequence[Series]) -> bool:
    n = len(p)
    for a, s in enumerate(p):
        e = tuple(int(i == a) for i in range(n))
        if s.terms != {(e, ()): 1}:
            return False
    return True


def at(f: Series, p: Sequence[Series]) -> Series:
    """``f(p)``; the generic point is handled by a cheap lift."""
    if _is_var_point(p):
        return f.lift(p[0].spec).truncate(vorder(p))
    return f.compose(p)


# ------------------------------------------------------------------ 1-forms


@dataclass
class CoordOneForm:
    """``Omega(x; v) = sum_a Omega_a(x) v_a`` with ``w x w`` matrix-series components."""

    omega: list  # list[MatrixSeries] over the base spec

    def __post_init__(self):
        if not self.omega:
            raise FormalError("a form needs at least one component")
        spec = self.omega[0].spec
        if spec.nblocks or spec.nvars != len(self.omega):
            raise FormalError("components must be base-variable series, one per coordinate")
        shapes = {m.shape for m in self.omega}
        if len(shapes) != 1 or next(iter(shapes))[0] != next(iter(shapes))[1]:
            raise FormalError("components must be square matrices of one size")

    @property
    def dim(self) -> int:
        return len(self.omega)

    @property
    def size(self) -> int:
        return self.omega[0].shape[0]

    @property
    def order(self) -> int:
        return min(m.order for m in self.omega)

    @classmethod
    def zero(cls, dim: int, size: int, order: int) -> "CoordOneForm":
        spec = BlockSpec(dim)
        return cls([MatrixSeries.zero(spec, size, order=order) for _ in range(dim)])


def _matrix_at(m: MatrixSeries, p) -> MatrixSeries:
    return m.map(lambda s: at(s, p))


def eval_form(form: CoordOneForm, point: Sequence[Series], block: int) -> MatrixSeries:
    """``omega(p, p + d_block) = 1 + sum_a Omega_a(p) eps_{block,a}``."""
    spec = point[0].spec
    if len(point) != form.dim:
        raise FormalError(f"point has {len(point)} coordinates, form has dimension {form.dim}")
    order = vorder(point)
    out = MatrixSeries.identity(spec, form.size, order)
    for a, m in enumerate(form.omega):
        out = out + _matrix_at(m, point).scale(Series.eps(spec, block, a, order))
    return out


def _omega_dir(form: CoordOneForm, ox: list, d: list) -> MatrixSeries:
    """``Omega(x; d)`` from pre-evaluated components ``ox``."""
    out = ox[0].scale(d[0])
    for a in range(1, form.dim):
        out = out + ox[a].scale(d[a])
    return out


def basicx_verify(form: CoordOneForm, order: int | None = None) -> MatrixSeries:
    """LHS - RHS of ``omega(x,y) omega(y,z) = 1 + Omega(x;d1+d2) + dOmega(x;d1,d2) + Omega(x;d1) Omega(x;d2)``.

    ``y = x + d1``, ``z = y + d2`` with generic first-order ``d1, d2``.  The
    residual is identically zero for every form.
    """
    N = form.order if order is None else order
    _need(form.order, N, "Omega")
    spec = BlockSpec(form.dim, 2)
    P = N + 2
    x = point_var(spec, P)
    d1, d2 = point_block(spec, 0, P), point_block(spec, 1, P)
    y = vadd(x, d1)
    lhs = eval_form(form, x, 0) @ eval_form(form, y, 1)
    ox = [_matrix_at(m.truncate(N), x) for m in form.omega]
    rhs = MatrixSeries.identity(spec, form.size, P) + _omega_dir(form, ox, vadd(d1, d2))
    for a in range(form.dim):
        for b in range(form.dim):
            rhs = rhs + _matrix_at(form.omega[b].truncate(N).derivative(a), x).scale(d1[a] * d2[b])
    rhs = rhs + _omega_dir(form, ox, d1) @ _omega_dir(form, ox, d2)
    return lhs - rhs


def _t(form: CoordOneForm, a: int, b: int) -> MatrixSeries:
    return form.omega[b].derivative(a) + form.omega[a] @ form.omega[b]


def closedness_residual(form: CoordOneForm) -> dict:
    """``{(a, b): T_ab - T_ba}`` for ``a < b`` with ``T_ab = d_a Omega_b + Omega_a Omega_b``.

    On first-order ``d1, d2`` with ``d1 + d2`` first order only the
    antisymmetric part of ``T`` survives, so the form is closed iff all of
    these vanish.
    """
    out = {}
    for a in range(form.dim):
        for b in range(a + 1, form.dim):
            out[(a, b)] = _t(form, a, b) - _t(form, b, a)
    return out


def closedness_residual_pairs(form: CoordOneForm) -> dict:
    """Same residual, read off ``omega(x,x+d1) omega(x+d1,x+d1+d2) - omega(x,x+d1+d2)``
    in the ring where ``d1 + d2`` is first order."""
    N = form.order
    spec = BlockSpec.make(form.dim, 2, [(0, 1)])
    P = N + 2
    x = point_var(spec, P)
    d1, d2 = point_block(spec, 0, P), point_block(spec, 1, P)
    lhs = eval_form(form, x, 0) @ eval_form(form, vadd(x, d1), 1)
    ox = [_matrix_at(m, x) for m in form.omega]
    diag = MatrixSeries.identity(spec, form.size, P) + _omega_dir(form, ox, vadd(d1, d2))
    diff = lhs - diag
    return {
        (a, b): diff.eps_part(((0, a), (1, b))).truncate(N - 1)
        for a in range(form.dim)
        for b in range(a + 1, form.dim)
    }


def is_closed(form: CoordOneForm) -> CheckReport:
    bad = [k for k, v in closedness_residual(form).items() if not v.is_zero()]
    return CheckReport(violations=bad)


def quadrangle_swap_defect(form: CoordOneForm) -> MatrixSeries:
    """``Q(d1, d2) - Q(d2, d1)`` with ``Q = omega(x, x+d1) omega(x+d1, x+d1+d2)``."""
    spec = BlockSpec(form.dim, 2)
    P = form.order + 2
    x = point_var(spec, P)
    q = eval_form(form, x, 0) @ eval_form(form, vadd(x, point_block(spec, 0, P)), 1)
    return q - q.permute_blocks({0: 1, 1: 0})


def maurer_cartan_from_map(f: MatrixSeries) -> CoordOneForm:
    """``Omega_a = f^-1 d_a f`` (the form ``f(x)^-1 f(y)``)."""
    if f.spec.nblocks:
        raise FormalError("map must be a series in the base variables")
    finv = f.invert()
    return CoordOneForm([finv @ f.derivative(a) for a in range(f.spec.nvars)])


def formal_primitive(form: CoordOneForm, order: int | None = None) -> MatrixSeries:
    """Solve ``d_a f = f Omega_a`` with ``f(0) = 1`` up to degree ``order``.

    Raises ObstructionError with the degree ``k`` at which ``d_b g_a != d_a g_b``
    for ``g_a = (f Omega_a)_k``.
    """
    N = form.order + 1 if order is None else order
    _need(form.order, N - 1, "Omega")
    spec = form.omega[0].spec
    n, w = form.dim, form.size
    x = point_var(spec, N)
    f = MatrixSeries.identity(spec, w, N)
    for k in range(N):
        g = [(f.truncate(k) @ form.omega[a].truncate(k)).map(lambda s: s.part(k)) for a in range(n)]
        if k >= 1:
            for a in range(n):
                for b in range(a + 1, n):
                    defect = g[a].derivative(b) - g[b].derivative(a)
                    if not defect.is_zero():
                        raise ObstructionError("primitive", k, (a, b), defect)
        step = g[0].scale(x[0])
        for a in range(1, n):
            step = step + g[a].scale(x[a])
        f = f + step.scale(Fraction(1, k + 1)).map(lambda s: _pad(s, N))
    check = maurer_cartan_from_map(f)
    for a in range(n):
        if not check.omega[a].truncate(N - 1) == form.omega[a].truncate(N - 1):
            raise FormalError("internal: primitive does not reproduce Omega")
    return f


def _pad(s: Series, order: int) -> Series:
    """Declare a polynomial known to ``order`` (only for values built degree by degree)."""
    return Series(s.spec, s.terms, order, normalized=True)


# ------------------------------------------------------------------ Christoffel fields


@dataclass
class ChristoffelField:
    dim: int
    order: int
    gamma: dict = field(default_factory=dict)  # (c, a, b) -> Series over the base spec

    def __post_init__(self):
        spec = BlockSpec(self.dim)
        clean = {}
        for k, s in self.gamma.items():
            if len(k) != 3 or not all(0 <= i < self.dim for i in k):
                raise FormalError(f"bad index {k}")
            if s.spec != spec:
                raise FormalError("Christoffel components must be base-variable series")
            _need(s.order, self.order, f"Gamma^{k[0]}_{k[1]}{k[2]}")
            s = s.truncate(self.order)
            if not s.is_zero():
                clean[tuple(k)] = s
        self.gamma = clean

    @property
    def spec(self) -> BlockSpec:
        return BlockSpec(self.dim)

    def __call__(self, c: int, a: int, b: int) -> Series:
        s = self.gamma.get((c, a, b))
        return s if s is not None else Series.zero(self.spec, self.order)

    def is_zero(self) -> bool:
        return not self.gamma

    def truncate(self, order: int) -> "ChristoffelField":
        return ChristoffelField(self.dim, min(order, self.order), dict(self.gamma))

    def __eq__(self, other):
        if not isinstance(other, ChristoffelField) or other.dim != self.dim:
            return NotImplemented
        n = min(self.order, other.order)
        return all(
            self(*k).truncate(n) == other(*k).truncate(n) for k in product(range(self.dim), repeat=3)
        )

    @classmethod
    def zero(cls, dim: int, order: int) -> "ChristoffelField":
        return cls(dim, order, {})


def gamma_apply(G: ChristoffelField, p, u, v) -> list:
    """``G(p; u, v)``."""
    n = G.dim
    at_p = {k: at(s, p) for k, s in G.gamma.items()}
    out = [Series.zero(p[0].spec, vorder(p)) for _ in range(n)]
    for (c, a, b), s in at_p.items():
        out[c] = out[c] + s * u[a] * v[b]
    return out


def lambda_coord(G: ChristoffelField, x, z, y) -> list:
    """``[z x y] = z - x + y + G(x; z - x, y - x)``."""
    if not len(x) == len(y) == len(z) == G.dim:
        raise FormalError("dimension mismatch")
    return vadd(vsub(z, x), y, gamma_apply(G, x, vsub(z, x), vsub(y, x)))


def torsion(G: ChristoffelField) -> dict:
    out = {}
    for c, a, b in product(range(G.dim), repeat=3):
        t = G(c, a, b) - G(c, b, a)
        if not t.is_zero():
            out[(c, a, b)] = t
    return out


def symmetry_check(G: ChristoffelField) -> CheckReport:
    return CheckReport(violations=sorted(k for k in torsion(G) if k[1] < k[2]))


def _require_symmetric(G: ChristoffelField):
    rep = symmetry_check(G)
    if not rep.ok:
        raise FormalError(f"Gamma is not symmetric, e.g. at component {rep.violations[0]}")


def _generic(dim: int, blocks: int, order: int):
    spec = BlockSpec(dim, blocks)
    x = point_var(spec, order)
    return spec, x, [vadd(x, point_block(spec, i, order)) for i in range(blocks)]


def affine_flatness_residual(G: ChristoffelField) -> list:
    """``[[z x0 x1] x1 [x1 x0 x2]] - [[z x0 x2] x2 [x2 x0 x1]]`` with generic neighbours.

    ``x1 = x0 + d1``, ``x2 = x0 + d2``, ``z = x0 + d3`` (blocks 0, 1, 2).
    """
    _require_symmetric(G)
    P = G.order + 3
    spec, x0, (x1, x2, z) = _generic(G.dim, 3, P)
    lam = lambda a, b, c: lambda_coord(G, b, a, c)  # [a b c]
    lhs = lam(lam(z, x0, x1), x1, lam(x1, x0, x2))
    rhs = lam(lam(z, x0, x2), x2, lam(x2, x0, x1))
    return vsub(lhs, rhs)


def curvature_tensor(G: ChristoffelField) -> dict:
    """Nonzero components ``(d, c, a, b) -> R^d_{cab}``."""
    n = G.dim
    out = {}
    for d, c, a, b in product(range(n), repeat=4):
        r = G(d, b, c).derivative(a) - G(d, a, c).derivative(b)
        for e in range(n):
            r = r - (G(e, b, c) * G(d, a, e) - G(e, a, c) * G(d, b, e))
        r = r.truncate(G.order - 1)
        if not r.is_zero():
            out[(d, c, a, b)] = r
    return out


def flatness_report(G: ChristoffelField) -> CheckReport:
    res = affine_flatness_residual(G)
    bad = [c for c, s in enumerate(res) if not s.is_zero()]
    return CheckReport(violations=bad)


def cube_expressions(G: ChristoffelField) -> dict:
    """The six cube-lemma expressions on ``p0 = x``, ``p1, p2, p4 = x + d1, x + d2, x + d3``."""
    P = G.order + 3
    spec, x, (q1, q2, q4) = _generic(G.dim, 3, P)
    p = {0: x, 1: q1, 2: q2, 4: q4}
    br = lambda a, b, c: lambda_coord(G, p[b], p[a], p[c])

    def outer(a, b, c, m, d, e, f):
        return lambda_coord(G, p[m], br(a, b, c), br(d, e, f))

    return {
        "[[401]1[102]]": outer(4, 0, 1, 1, 1, 0, 2),
        "[[402]2[201]]": outer(4, 0, 2, 2, 2, 0, 1),
        "[[204]4[401]]": outer(2, 0, 4, 4, 4, 0, 1),
        "[[201]1[104]]": outer(2, 0, 1, 1, 1, 0, 4),
        "[[102]2[204]]": outer(1, 0, 2, 2, 2, 0, 4),
        "[[104]4[402]]": outer(1, 0, 4, 4, 4, 0, 2),
    }


def cube_check(G: ChristoffelField) -> CheckReport:
    vals = cube_expressions(G)
    names = list(vals)
    bad = [f"{names[0]}={k}" for k in names[1:] if not veq(vals[names[0]], vals[k])]
    return CheckReport(violations=bad)


# ------------------------------------------------------------------ maps and pullbacks


def identity_map(dim: int, order: int) -> list:
    return point_var(BlockSpec(dim), order)


def check_normalized_map(psi: Sequence[Series]) -> None:
    spec = psi[0].spec
    if spec.nblocks or len(psi) != spec.nvars:
        raise FormalError("a map needs one base-variable series per coordinate")
    for c, s in enumerate(psi):
        if s.constant_term():
            raise FormalError(f"component {c} has a non-zero constant term")
        lin = s.part(1)
        e = tuple(int(i == c) for i in range(spec.nvars))
        if lin.terms != {(e, ()): 1}:
            raise FormalError(f"component {c} does not have identity linear part")


def compose_maps(psi1: Sequence[Series], psi2: Sequence[Series]) -> list:
    """``psi1 o psi2``."""
    return vcompose(psi1, psi2)


def pullback_connection(psi: Sequence[Series], G: ChristoffelField) -> ChristoffelField:
    """The ``G'`` with ``psi([z x y]_{G'}) = [psi z, psi x, psi y]_G``."""
    check_normalized_map(psi)
    n = len(psi)
    if n != G.dim:
        raise FormalError("dimension mismatch")
    P = min(vorder(psi), G.order + 2)
    inv = compositional_inverse([s.truncate(P) for s in psi])
    spec, x, (z, y) = _generic(n, 2, P)
    X, Z, Y = (vcompose(psi, p) for p in (x, z, y))
    W = vcompose(inv, lambda_coord(G, X, Z, Y))
    rest = vsub(W, vadd(z, y, vscale(-1, x)))
    gamma = {}
    for c in range(n):
        for a in range(n):
            for b in range(n):
                gamma[(c, a, b)] = rest[c].eps_part(((0, a), (1, b))).truncate(P - 2)
        leftover = Series(spec, {m: v for m, v in rest[c].terms.items() if len(m[1]) != 2}, rest[c].order, True)
        if not leftover.truncate(P).is_zero():
            raise FormalError("internal: conjugated operation is not of Christoffel form")
    return ChristoffelField(n, P - 2, gamma)


# ------------------------------------------------------------------ scalars


def scalar_combination(x, y, t) -> list:
    """``(1 - t) x + t y``."""
    t = Fraction(t)
    return vadd(vscale(1 - t, x), vscale(t, y))


@dataclass
class ScalarReport:
    residual: list
    swap_invariant: bool

    @property
    def ok(self) -> bool:
        return self.swap_invariant and all(s.is_zero() for s in self.residual)


def second_order_scalar_verify(G: ChristoffelField, t) -> ScalarReport:
    """``lambda(x, y_t, z_t)`` against ``x + t(d1+d2) + (t^2-t)/2 G(d1+d2, d1+d2)``.

    ``y = x + d1``, ``z = x + d2 - G(x; d1, d2)`` so that ``lambda(x, y, z) = x + d1 + d2``.
    """
    _require_symmetric(G)
    t = Fraction(t)
    P = G.order + 2
    spec, x, (y, _) = _generic(G.dim, 2, P)
    d1, d2 = point_block(spec, 0, P), point_block(spec, 1, P)
    z = vsub(vadd(x, d2), gamma_apply(G, x, d1, d2))
    yt, zt = scalar_combination(x, y, t), scalar_combination(x, z, t)
    val = lambda_coord(G, x, zt, yt)
    s = vadd(d1, d2)
    closed = vadd(x, vscale(t, s), vscale((t * t - t) / 2, gamma_apply(G, x, s, s)))
    swapped = [v.permute_blocks({0: 1, 1: 0}) for v in val]
    return ScalarReport(vsub(val, closed), veq(val, swapped))


# ------------------------------------------------------------------ charts


@dataclass
class FormalChart:
    components: list  # list[Series] over the base spec

    def __post_init__(self):
        check_normalized_map(self.components)
        self._inverse = None

    @property
    def dim(self) -> int:
        return len(self.components)

    @property
    def order(self) -> int:
        return vorder(self.components)

    def __call__(self, p) -> list:
        return vcompose(self.components, p)

    def inverse(self) -> list:
        if self._inverse is None:
            self._inverse = compositional_inverse(self.components)
        return self._inverse


def formal_chart(G: ChristoffelField, order: int | None = None) -> FormalChart:
    """Solve for ``phi`` with ``phi(0) = 0``, ``dphi(0) = 1`` trivializing ``G``.

    At degree ``k`` the Hessian ``H^c_ab = -(sum_e d_e phi^c G^e_ab)_{k-2}`` must
    satisfy ``d_e H^c_ab = d_a H^c_eb``; failure raises ObstructionError at
    degree ``k - 3`` (the degree of the offending curvature term).
    """
    _require_symmetric(G)
    n = G.dim
    N = G.order + 2 if order is None else order
    _need(G.order, N - 2, "Gamma")
    spec = BlockSpec(n)
    x = point_var(spec, N)
    phi = [Series.var(spec, c, N) for c in range(n)]
    for k in range(2, N + 1):
        H = {}
        for c in range(n):
            dphi = [phi[c].derivative(e).truncate(k - 2) for e in range(n)]
            for a in range(n):
                for b in range(a, n):
                    acc = Series.zero(spec, k - 2)
                    for e in range(n):
                        g = G(e, a, b)
                        if not g.is_zero():
                            acc = acc + dphi[e] * g.truncate(k - 2)
                    H[(c, a, b)] = H[(c, b, a)] = -acc.part(k - 2)
        if k >= 3:
            for c, e, a, b in product(range(n), repeat=4):
                if a < e:
                    continue
                defect = H[(c, a, b)].derivative(e) - H[(c, e, b)].derivative(a)
                if not defect.is_zero():
                    raise ObstructionError("chart", k - 3, (c, e, a, b), defect)
        for c in range(n):
            step = Series.zero(spec, N)
            for a in range(n):
                for b in range(n):
                    step = step + _pad(H[(c, a, b)], N) * x[a] * x[b]
            phi[c] = phi[c] + step.scale(Fraction(1, k * (k - 1)))
    return FormalChart([_pad(s, N) for s in phi])


def trivialization_residual(chart: FormalChart, G: ChristoffelField) -> list:
    """``phi([z x y]) - (phi(z) - phi(x) + phi(y))`` with ``z = x + d1``, ``y = x + d2``."""
    P = chart.order
    _spec, x, (z, y) = _generic(G.dim, 2, P)
    lhs = chart(lambda_coord(G, x, z, y))
    rhs = vadd(vsub(chart(z), chart(x)), chart(y))
    return [s.truncate(P) for s in vsub(lhs, rhs)]


def heap_via_chart(chart: FormalChart, o, x, y) -> list:
    """``x +_o y = phi^-1(phi(x) - phi(o) + phi(y))``."""
    return vcompose(chart.inverse(), vadd(vsub(chart(x), chart(o)), chart(y)))


def heap_inverse_via_chart(chart: FormalChart, o, x) -> list:
    return vcompose(chart.inverse(), vsub(vscale(2, chart(o)), chart(x)))


def grid_vs_chart(chart: FormalChart, G: ChristoffelField, base=None) -> tuple:
    """Codomain of the 2x2 grid on ``o, o+d1, o+d1+d2`` and ``o, o+d3, o+d3+d4`` vs the chart heap.

    ``base`` is the point ``o`` (default: the origin).  Returns both points.
    """
    n = G.dim
    P = chart.order
    spec = BlockSpec(n, 4)
    o = point_zero(spec, P) if base is None else base(spec, P)
    d = [point_block(spec, i, P) for i in range(4)]
    yp = [o, vadd(o, d[0]), vadd(o, d[0], d[1])]
    zp = [o, vadd(o, d[2]), vadd(o, d[2], d[3])]
    u = [[None] * 3 for _ in range(3)]
    u[0] = list(yp)
    for i in range(1, 3):
        u[i][0] = zp[i]
    for i in range(2):
        for j in range(2):
            u[i + 1][j + 1] = lambda_coord(G, u[i][j], u[i + 1][j], u[i][j + 1])
    grid = [s.truncate(P) for s in u[2][2]]
    heap = [s.truncate(P) for s in heap_via_chart(chart, o, zp[-1], yp[-1])]
    return grid, heap
