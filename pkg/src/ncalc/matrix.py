"""Matrices whose entries are truncated series."""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

from .series import BlockSpec, Series, SeriesError


class MatrixSeries:
    def __init__(self, rows: Sequence[Sequence[Series]]):
        self.rows = tuple(tuple(r) for r in rows)
        if not self.rows or not self.rows[0]:
            raise SeriesError("empty matrix")
        width = len(self.rows[0])
        spec = self.rows[0][0].spec
        for r in self.rows:
            if len(r) != width:
                raise SeriesError("ragged matrix")
            for s in r:
                if s.spec != spec:
                    raise SeriesError("matrix entries must share a block spec")

    @property
    def shape(self) -> tuple:
        return len(self.rows), len(self.rows[0])

    @property
    def spec(self) -> BlockSpec:
        return self.rows[0][0].spec

    @property
    def order(self) -> int:
        return min(s.order for r in self.rows for s in r)

    @classmethod
    def identity(cls, spec: BlockSpec, n: int, order: int = 6) -> "MatrixSeries":
        return cls([[Series.const(spec, int(i == j), order) for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, spec: BlockSpec, rows: int, cols: int | None = None, order: int = 6) -> "MatrixSeries":
        return cls([[Series.zero(spec, order) for _ in range(cols or rows)] for _ in range(rows)])

    @classmethod
    def constant(cls, spec: BlockSpec, mat, order: int = 6) -> "MatrixSeries":
        return cls([[Series.const(spec, c, order) for c in r] for r in mat])

    def __getitem__(self, ij) -> Series:
        i, j = ij
        return self.rows[i][j]

    def map(self, fn: Callable[[Series], Series]) -> "MatrixSeries":
        return MatrixSeries([[fn(s) for s in r] for r in self.rows])

    def __add__(self, other: "MatrixSeries") -> "MatrixSeries":
        self._same_shape(other)
        return MatrixSeries([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "MatrixSeries") -> "MatrixSeries":
        self._same_shape(other)
        return MatrixSeries([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return self.map(lambda s: -s)

    def scale(self, c) -> "MatrixSeries":
        if isinstance(c, Series):
            return self.map(lambda s: s * c)
        return self.map(lambda s: s.scale(c))

    def __matmul__(self, other: "MatrixSeries") -> "MatrixSeries":
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise SeriesError(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for i in range(n):
            row = []
            for j in range(m):
                acc = self.rows[i][0] * other.rows[0][j]
                for t in range(1, k):
                    acc = acc + self.rows[i][t] * other.rows[t][j]
                row.append(acc)
            out.append(row)
        return MatrixSeries(out)

    __mul__ = __matmul__

    def _same_shape(self, other):
        if self.shape != other.shape:
            raise SeriesError(f"shape mismatch {self.shape} vs {other.shape}")

    def __eq__(self, other):
        if not isinstance(other, MatrixSeries):
            return NotImplemented
        return self.shape == other.shape and all(a == b for r, s in zip(self.rows, other.rows) for a, b in zip(r, s))

    __hash__ = None

    def is_zero(self) -> bool:
        return all(s.is_zero() for r in self.rows for s in r)

    def constant_matrix(self) -> list[list[Fraction]]:
        return [[s.constant_term() for s in r] for r in self.rows]

    def derivative(self, a: int) -> "MatrixSeries":
        return self.map(lambda s: s.derivative(a))

    def compose(self, G: Sequence[Series]) -> "MatrixSeries":
        return self.map(lambda s: s.compose(G))

    def taylor_shift(self, block: int) -> "MatrixSeries":
        return self.map(lambda s: s.taylor_shift(block))

    def lift(self, spec: BlockSpec) -> "MatrixSeries":
        return self.map(lambda s: s.lift(spec))

    def truncate(self, order: int) -> "MatrixSeries":
        return self.map(lambda s: s.truncate(order))

    def eps_part(self, key) -> "MatrixSeries":
        return self.map(lambda s: s.eps_part(key))

    def permute_blocks(self, perm) -> "MatrixSeries":
        return self.map(lambda s: s.permute_blocks(perm))

    def invert(self) -> "MatrixSeries":
        """Inverse via the Neumann series of ``C^-1 (M - C)``, ``C`` the constant part."""
        n, m = self.shape
        if n != m:
            raise SeriesError("only square matrices are invertible")
        cinv = invert_rational(self.constant_matrix())
        spec, order = self.spec, self.order
        C = MatrixSeries.constant(spec, cinv, order)
        A = C @ (self - MatrixSeries.constant(spec, self.constant_matrix(), order))
        # (1 + A)^-1 = sum (-A)^k; A has positive valuation so the sum is finite
        term = MatrixSeries.identity(spec, n, order)
        total = term
        for _ in range(order + 1):
            term = -(term @ A)
            if term.is_zero():
                break
            total = total + term
        return total @ C

    def to_json(self) -> list:
        return [[s.to_json() for s in r] for r in self.rows]

    @classmethod
    def from_json(cls, data) -> "MatrixSeries":
        if not isinstance(data, list) or not data:
            raise SeriesError("matrix series must be a non-empty list of rows")
        return cls([[Series.from_json(s) for s in r] for r in data])

    def __repr__(self):
        return "MatrixSeries(" + "; ".join(", ".join(s.to_text() for s in r) for r in self.rows) + ")"


def invert_rational(mat: Sequence[Sequence]) -> list[list[Fraction]]:
    """Gauss-Jordan inverse over the rationals."""
    n = len(mat)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise SeriesError("singular constant term")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]
