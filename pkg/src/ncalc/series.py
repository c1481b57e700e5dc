"""Truncated multivariate series over the rationals with square-zero generator blocks.

A monomial is ``x^e * eps_{i1,a1} ... eps_{ik,ak}`` with at most one generator
per block.  Each block ``i`` models a generic point ``d_i`` of the first-order
neighbourhood of 0 (``eps_{i,a} eps_{i,b} = 0``); a declared pair ``{i, j}``
adds ``eps_{i,a} eps_{j,b} + eps_{i,b} eps_{j,a} = 0`` (so ``d_i + d_j`` is
again first order).

Generators count as degree 1.  A series carries an ``order``: every term of
total degree ``<= order`` is exact and nothing above it is stored.  Results of
arithmetic get the largest order that is still guaranteed, so truncation is
never silent.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

Monomial = tuple  # (exps: tuple[int, ...], eps: tuple[(block, coord), ...] sorted by block)


class SeriesError(ValueError):
    pass


@dataclass(frozen=True)
class BlockSpec:
    nvars: int
    nblocks: int = 0
    pairs: frozenset = frozenset()

    def __post_init__(self):
        norm = frozenset(frozenset(p) for p in self.pairs)
        for p in norm:
            if len(p) != 2 or not all(0 <= i < self.nblocks for i in p):
                raise SeriesError(f"bad block pair {sorted(p)}")
        object.__setattr__(self, "pairs", norm)
        if self.nvars < 1 or self.nblocks < 0:
            raise SeriesError("need at least one variable")

    @classmethod
    def make(cls, nvars: int, nblocks: int = 0, pairs: Iterable[Sequence[int]] = ()):
        return cls(nvars, nblocks, frozenset(frozenset(p) for p in pairs))

    def paired(self, i: int, j: int) -> bool:
        return frozenset((i, j)) in self.pairs

    def base(self) -> "BlockSpec":
        return BlockSpec(self.nvars)

    def to_json(self) -> list:
        return [
            {"pairs_with": sorted(j for j in range(self.nblocks) if self.paired(i, j))}
            for i in range(self.nblocks)
        ]


@lru_cache(maxsize=None)
def _components(spec: BlockSpec, blocks: tuple) -> tuple:
    """Connected components of the declared-pair graph restricted to ``blocks``."""
    left = list(blocks)
    out = []
    while left:
        comp = [left.pop(0)]
        grow = True
        while grow:
            grow = False
            for b in list(left):
                if any(spec.paired(b, c) for c in comp):
                    comp.append(b)
                    left.remove(b)
                    grow = True
        out.append(tuple(sorted(comp)))
    return tuple(out)


def _parity(seq) -> int:
    s = list(seq)
    sign = 1
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            if s[i] > s[j]:
                sign = -sign
    return sign


@lru_cache(maxsize=None)
def normalize_eps(spec: BlockSpec, factors: tuple):
    """Normal form ``(sign, key)`` of a product of generators, or None if it vanishes.

    Within each component of the pair graph the coordinates are sorted along
    increasing block index; the sign is the parity of that rearrangement.
    """
    by_block = {}
    for b, c in factors:
        if b in by_block:
            return None
        by_block[b] = c
    blocks = tuple(sorted(by_block))
    sign = 1
    for comp in _components(spec, blocks):
        if len(comp) == 1:
            continue
        coords = [by_block[b] for b in comp]
        if len(set(coords)) < len(coords):
            return None
        sign *= _parity(coords)
        for b, c in zip(comp, sorted(coords)):
            by_block[b] = c
    return sign, tuple((b, by_block[b]) for b in blocks)


@lru_cache(maxsize=None)
def _eps_mul(spec: BlockSpec, p: tuple, q: tuple):
    return normalize_eps(spec, p + q)


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, str)) and not isinstance(c, bool):
        return Fraction(c)
    raise SeriesError(f"not an exact rational: {c!r}")


def _deg(m: Monomial) -> int:
    return sum(m[0]) + len(m[1])


class Series:
    """Immutable truncated series; see the module docstring for the precision model."""

    __slots__ = ("spec", "order", "terms", "_val")

    def __init__(self, spec: BlockSpec, terms: Mapping[Monomial, object] | None = None, order: int = 6,
                 normalized: bool = False):
        self.spec = spec
        self.order = order
        out: dict = {}
        for (exps, eps), c in (terms or {}).items():
            c = _frac(c)
            if not c:
                continue
            if len(exps) != spec.nvars:
                raise SeriesError(f"exponent vector {exps} does not match {spec.nvars} variables")
            if not normalized:
                for b, a in eps:
                    if not (0 <= b < spec.nblocks and 0 <= a < spec.nvars):
                        raise SeriesError(f"generator ({b}, {a}) out of range")
                r = normalize_eps(spec, tuple(eps))
                if r is None:
                    continue
                sign, eps = r
                c = c * sign
            key = (tuple(exps), eps)
            if sum(exps) + len(eps) > order:
                continue
            v = out.get(key, 0) + c
            if v:
                out[key] = v
            else:
                out.pop(key, None)
        self.terms = out
        self._val = None

    # -- constructors --------------------------------------------------------
    @classmethod
    def const(cls, spec: BlockSpec, c, order: int = 6) -> "Series":
        return cls(spec, {((0,) * spec.nvars, ()): c}, order)

    @classmethod
    def zero(cls, spec: BlockSpec, order: int = 6) -> "Series":
        return cls(spec, {}, order)

    @classmethod
    def var(cls, spec: BlockSpec, a: int, order: int = 6) -> "Series":
        e = [0] * spec.nvars
        e[a] = 1
        return cls(spec, {(tuple(e), ()): 1}, order)

    @classmethod
    def eps(cls, spec: BlockSpec, block: int, a: int, order: int = 6) -> "Series":
        return cls(spec, {((0,) * spec.nvars, ((block, a),)): 1}, order)

    @classmethod
    def monomial(cls, spec: BlockSpec, exps, eps=(), coef=1, order: int = 6) -> "Series":
        return cls(spec, {(tuple(exps), tuple(eps)): coef}, order)

    def _new(self, terms: dict, order: int) -> "Series":
        s = Series.__new__(Series)
        s.spec, s.order, s._val = self.spec, order, None
        s.terms = {k: v for k, v in terms.items() if v and _deg(k) <= order}
        return s

    # -- basic queries -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def valuation(self) -> int:
        """Lowest degree that may be nonzero (``order + 1`` for a truncated zero)."""
        if self._val is None:
            self._val = min((_deg(m) for m in self.terms), default=self.order + 1)
        return self._val

    def constant_term(self) -> Fraction:
        return self.terms.get(((0,) * self.spec.nvars, ()), Fraction(0))

    def _check(self, other: "Series"):
        if other.spec != self.spec:
            raise SeriesError(f"block spec mismatch: {self.spec} vs {other.spec}")

    def _coerce(self, other) -> "Series":
        if isinstance(other, Series):
            self._check(other)
            return other
        return Series.const(self.spec, _frac(other), self.order)

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return self._new(t, min(self.order, other.order))

    __radd__ = __add__

    def __neg__(self):
        return self._new({k: -v for k, v in self.terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Series":
        c = _frac(c)
        return self._new({k: v * c for k, v in self.terms.items()}, self.order)

    def __mul__(self, other):
        if not isinstance(other, Series):
            return self.scale(other)
        self._check(other)
        order = min(self.order + other.valuation, other.order + self.valuation, max(self.order, other.order))
        return self._new(_mul_terms(self.spec, self.terms, other.terms, order), order)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        out = Series.const(self.spec, 1, self.order)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Series.const(self.spec, other, self.order)
        if not isinstance(other, Series) or other.spec != self.spec:
            return NotImplemented
        n = min(self.order, other.order)
        return self.truncate(n).terms == other.truncate(n).terms

    __hash__ = None

    def __repr__(self):
        return f"Series(order={self.order}, {self.to_text()})"

    # -- structural operations -----------------------------------------------
    def truncate(self, order: int) -> "Series":
        return self._new(self.terms, min(order, self.order))

    def with_order(self, order: int) -> "Series":
        """Same terms, lower order (raising the order is refused)."""
        if order > self.order:
            raise SeriesError(f"cannot raise precision from {self.order} to {order}")
        return self.truncate(order)

    def part(self, k: int) -> "Series":
        """Homogeneous component of total degree ``k``."""
        return self._new({m: c for m, c in self.terms.items() if _deg(m) == k}, self.order)

    def derivative(self, a: int) -> "Series":
        t = {}
        for (e, p), c in self.terms.items():
            if e[a]:
                e2 = list(e)
                e2[a] -= 1
                t[(tuple(e2), p)] = c * e[a]
        return self._new(t, self.order - 1)

    def eps_part(self, key: tuple) -> "Series":
        """Coefficient of the generator monomial ``key`` as a series in the base variables."""
        r = normalize_eps(self.spec, tuple(key))
        if r is None:
            return Series.zero(self.spec.base(), self.order - len(key))
        sign, key = r
        t = {(e, ()): c * sign for (e, p), c in self.terms.items() if p == key}
        return Series(self.spec.base(), t, self.order - len(key), normalized=True)

    def eps_free(self) -> "Series":
        return self._new({m: c for m, c in self.terms.items() if not m[1]}, self.order)

    def lift(self, spec: BlockSpec) -> "Series":
        """Embed into a spec with the same variables and at least as many blocks."""
        if spec.nvars != self.spec.nvars or spec.nblocks < self.spec.nblocks:
            raise SeriesError("can only lift into a spec with more blocks")
        return Series(spec, self.terms, self.order)

    def permute_blocks(self, perm: Mapping[int, int]) -> "Series":
        t = {}
        for (e, p), c in self.terms.items():
            r = normalize_eps(self.spec, tuple((perm.get(b, b), a) for b, a in p))
            if r is None:
                continue
            sign, key = r
            t[(e, key)] = t.get((e, key), 0) + sign * c
        return self._new(t, self.order)

    def taylor_shift(self, block: int) -> "Series":
        """``F(x + d_block)``."""
        if not 0 <= block < self.spec.nblocks:
            raise SeriesError(f"unknown block {block}")
        pt = [Series.var(self.spec, a, self.order) + Series.eps(self.spec, block, a, self.order)
              for a in range(self.spec.nvars)]
        return self.compose(pt)

    def compose(self, G: Sequence["Series"]) -> "Series":
        """Substitute ``x_a -> G[a]``; the ``G[a]`` must have zero constant term."""
        if len(G) != self.spec.nvars:
            raise SeriesError(f"need {self.spec.nvars} substitutions, got {len(G)}")
        tspec = G[0].spec
        for g in G:
            if g.spec != tspec:
                raise SeriesError("substituted series must share a block spec")
            if g.constant_term():
                raise SeriesError("substitution has a non-zero constant term")
        if self.spec.nblocks and self.spec != tspec:
            raise SeriesError("generators of the outer series must live in the target spec")
        vG = max(1, min(g.valuation for g in G))
        nG = min(g.order for g in G)
        order = min((self.order + 1) * vG - 1, nG, max(self.order, nG))
        memo = {(0,) * self.spec.nvars: {((0,) * tspec.nvars, ()): Fraction(1)}}

        def power(e):
            got = memo.get(e)
            if got is not None:
                return got
            a = next(i for i, k in enumerate(e) if k)
            prev = list(e)
            prev[a] -= 1
            got = memo[e] = _mul_terms(tspec, power(tuple(prev)), G[a].terms, order)
            return got

        out: dict = {}
        for (e, p), c in self.terms.items():
            if sum(e) * vG + len(p) > order:
                continue
            t = power(e)
            if p:
                t = _mul_terms(tspec, t, {((0,) * tspec.nvars, p): Fraction(1)}, order)
            for k, v in t.items():
                out[k] = out.get(k, 0) + c * v
        s = Series.__new__(Series)
        s.spec, s.order, s._val = tspec, order, None
        s.terms = {k: v for k, v in out.items() if v and _deg(k) <= order}
        return s

    # -- serialization -------------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: (_deg(kv[0]), tuple(-x for x in kv[0][0]), kv[0][1]))

    def to_json(self) -> dict:
        return {
            "vars": self.spec.nvars,
            "order": self.order,
            "blocks": self.spec.to_json(),
            "terms": [
                {"exp": list(e), "block_part": [list(b) for b in p], "coef": str(c)}
                for (e, p), c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Series":
        try:
            nvars = int(data["vars"])
            order = int(data["order"])
            blocks = data.get("blocks", [])
            pairs = {frozenset((i, j)) for i, b in enumerate(blocks) for j in b.get("pairs_with", []) if i != j}
            for p in pairs:
                i, j = tuple(p)
                if j >= len(blocks) or i not in blocks[j].get("pairs_with", []):
                    raise SeriesError(f"pair relation {sorted(p)} must be declared on both blocks")
            spec = BlockSpec(nvars, len(blocks), frozenset(pairs))
            terms: dict = {}
            for t in data.get("terms", []):
                key = (tuple(int(x) for x in t["exp"]), tuple(tuple(int(v) for v in b) for b in t.get("block_part", [])))
                if any(x < 0 for x in key[0]):
                    raise SeriesError("negative exponent")
                coef = t["coef"]
                if not isinstance(coef, (str, int)) or isinstance(coef, bool):
                    raise SeriesError(f"coefficient {coef!r} must be an exact rational string")
                terms[key] = terms.get(key, 0) + Fraction(coef)
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, SeriesError):
                raise
            raise SeriesError(f"malformed series: {exc}") from None
        return cls(spec, terms, order)

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (e, p), c in self.sorted_terms():
            fac = [f"x{a}" + (f"^{k}" if k > 1 else "") for a, k in enumerate(e) if k]
            fac += [f"e{b}_{a}" for b, a in p]
            parts.append("*".join([str(c)] + fac) if fac and c != 1 else ("*".join(fac) if fac else str(c)))
        return " + ".join(parts)


def _mul_terms(spec: BlockSpec, t1: Mapping, t2: Mapping, maxdeg: int) -> dict:
    out: dict = {}
    if not t1 or not t2:
        return out
    b = sorted(((_deg(m), m, c) for m, c in t2.items()), key=lambda r: r[0])
    for m1, c1 in t1.items():
        d1 = _deg(m1)
        e1, p1 = m1
        for d2, (e2, p2), c2 in b:
            if d1 + d2 > maxdeg:
                break
            if p1 and p2:
                r = _eps_mul(spec, p1, p2)
                if r is None:
                    continue
                sign, p = r
                c = c1 * c2 if sign > 0 else -c1 * c2
            else:
                p = p1 or p2
                c = c1 * c2
            k = (tuple(x + y for x, y in zip(e1, e2)), p)
            out[k] = out.get(k, 0) + c
    return {k: v for k, v in out.items() if v}


# ------------------------------------------------------------------ points


def point_var(spec: BlockSpec, order: int) -> list[Series]:
    """The generic point ``x``."""
    return [Series.var(spec, a, order) for a in range(spec.nvars)]


def point_block(spec: BlockSpec, block: int, order: int) -> list[Series]:
    """The generic first-order displacement ``d_block``."""
    return [Series.eps(spec, block, a, order) for a in range(spec.nvars)]


def point_zero(spec: BlockSpec, order: int) -> list[Series]:
    return [Series.zero(spec, order) for _ in range(spec.nvars)]


def vadd(*ps):
    return [sum(cs[1:], cs[0]) for cs in zip(*ps)]


def vsub(p, q):
    return [a - b for a, b in zip(p, q)]


def vscale(c, p):
    return [a.scale(c) for a in p]


def vcompose(F: Sequence[Series], G: Sequence[Series]) -> list[Series]:
    return [f.compose(G) for f in F]


def veq(p, q) -> bool:
    return len(p) == len(q) and all(a == b for a, b in zip(p, q))


def vorder(p) -> int:
    return min(a.order for a in p)


def compositional_inverse(psi: Sequence[Series]) -> list[Series]:
    """Inverse of a formal map with zero constant term and identity linear part."""
    spec = psi[0].spec
    n = spec.nvars
    order = vorder(psi)
    x = point_var(spec, order)
    q = vsub(psi, x)
    for c in range(n):
        if q[c].constant_term() or q[c].part(1).terms:
            raise SeriesError("map must have zero constant term and identity linear part")
    phi = list(x)
    for _ in range(order):
        phi = vsub(x, vcompose(q, phi))
    return phi
