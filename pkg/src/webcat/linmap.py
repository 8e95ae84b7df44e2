"""Sparse linear maps over exact or complex scalars, plus small dense helpers."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import SingularMatrix
from .qscalar import DEFAULT_EPS, SAMPLE_V, FieldElement, QContext, specialize


def _is_zero(x) -> bool:
    if isinstance(x, FieldElement):
        return x.is_zero()
    return x == 0


class LinearMap:
    """rows x cols matrix stored as {(i, j): nonzero scalar}."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: dict | None = None):
        self.rows = rows
        self.cols = cols
        self.data = {k: v for k, v in (data or {}).items() if not _is_zero(v)}
        for i, j in self.data:
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError(f"entry ({i},{j}) outside {rows}x{cols}")

    @classmethod
    def identity(cls, n: int, one=1) -> LinearMap:
        return cls(n, n, {(i, i): one for i in range(n)})

    @classmethod
    def zeros(cls, rows: int, cols: int) -> LinearMap:
        return cls(rows, cols)

    @classmethod
    def from_dense(cls, a) -> LinearMap:
        a = [list(r) for r in a]
        rows = len(a)
        cols = len(a[0]) if rows else 0
        return cls(rows, cols, {(i, j): a[i][j] for i in range(rows) for j in range(cols)})

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def get(self, i: int, j: int, zero=0):
        return self.data.get((i, j), zero)

    def to_dense(self, zero=0) -> list[list]:
        out = [[zero] * self.cols for _ in range(self.rows)]
        for (i, j), x in self.data.items():
            out[i][j] = x
        return out

    def to_numpy(self, v0: complex = SAMPLE_V) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=complex)
        for (i, j), x in self.data.items():
            out[i, j] = specialize(x, v0) if isinstance(x, FieldElement) else complex(x)
        return out

    def transpose(self) -> LinearMap:
        return LinearMap(self.cols, self.rows, {(j, i): x for (i, j), x in self.data.items()})

    @property
    def T(self) -> LinearMap:
        return self.transpose()

    def __matmul__(self, other: LinearMap) -> LinearMap:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        by_row: dict[int, list] = {}
        for (k, j), y in other.data.items():
            by_row.setdefault(k, []).append((j, y))
        out: dict = {}
        for (i, k), x in self.data.items():
            for j, y in by_row.get(k, ()):
                key = (i, j)
                out[key] = out[key] + x * y if key in out else x * y
        return LinearMap(self.rows, other.cols, out)

    def kron(self, other: LinearMap) -> LinearMap:
        out = {}
        for (i, j), x in self.data.items():
            for (k, l), y in other.data.items():
                out[(i * other.rows + k, j * other.cols + l)] = x * y
        return LinearMap(self.rows * other.rows, self.cols * other.cols, out)

    def __add__(self, other: LinearMap) -> LinearMap:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        out = dict(self.data)
        for k, y in other.data.items():
            out[k] = out[k] + y if k in out else y
        return LinearMap(self.rows, self.cols, out)

    def __neg__(self) -> LinearMap:
        return LinearMap(self.rows, self.cols, {k: -x for k, x in self.data.items()})

    def __sub__(self, other: LinearMap) -> LinearMap:
        return self + (-other)

    def scale(self, c) -> LinearMap:
        return LinearMap(self.rows, self.cols, {k: c * x for k, x in self.data.items()})

    def __rmul__(self, c) -> LinearMap:
        return self.scale(c)

    def is_zero(self, eps: float = DEFAULT_EPS) -> bool:
        for x in self.data.values():
            if isinstance(x, FieldElement):
                return False
            if abs(x) >= eps:
                return False
        return True

    def max_abs(self, v0: complex = SAMPLE_V) -> float:
        best = 0.0
        for x in self.data.values():
            val = specialize(x, v0) if isinstance(x, FieldElement) else complex(x)
            best = max(best, abs(val))
        return best

    def equals(self, other: LinearMap, eps: float = DEFAULT_EPS) -> bool:
        return self.shape == other.shape and (self - other).is_zero(eps)

    def __eq__(self, other) -> bool:
        return isinstance(other, LinearMap) and self.shape == other.shape and (self - other).is_zero(0.0)

    __hash__ = None

    def __repr__(self) -> str:
        return f"LinearMap({self.rows}x{self.cols}, nnz={len(self.data)})"


# dense helpers over a QContext -------------------------------------------------

def mat_mul(a: list[list], b: list[list], ctx: QContext) -> list[list]:
    n, m, p = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = ctx.zero()
            for k in range(m):
                x, y = a[i][k], b[k][j]
                if not _is_zero(x) and not _is_zero(y):
                    acc = acc + x * y
            row.append(acc)
        out.append(row)
    return out


def mat_transpose(a: list[list]) -> list[list]:
    return [list(r) for r in zip(*a)]


def mat_identity(n: int, ctx: QContext) -> list[list]:
    return [[ctx.one() if i == j else ctx.zero() for j in range(n)] for i in range(n)]


def _pick_pivot(col: list, ctx: QContext, start: int) -> int | None:
    if ctx.exact:
        for r in range(start, len(col)):
            if not _is_zero(col[r]):
                return r
        return None
    best, idx = 0.0, None
    for r in range(start, len(col)):
        if abs(col[r]) > best:
            best, idx = abs(col[r]), r
    return idx if best > ctx.eps else None


def mat_inverse(a: list[list], ctx: QContext) -> list[list]:
    """Gauss-Jordan inverse; numeric mode defers to numpy."""
    n = len(a)
    if not ctx.exact:
        arr = np.array(a, dtype=complex)
        if n == 0:
            return []
        if np.linalg.matrix_rank(arr, tol=ctx.eps * max(1.0, np.abs(arr).max())) < n:
            raise SingularMatrix("matrix is singular")
        return np.linalg.inv(arr).tolist()
    work = [list(row) + [ctx.one() if i == j else ctx.zero() for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        p = _pick_pivot([work[r][c] for r in range(n)], ctx, c)
        if p is None:
            raise SingularMatrix("matrix is singular")
        work[c], work[p] = work[p], work[c]
        inv = 1 / work[c][c]
        work[c] = [x * inv for x in work[c]]
        for r in range(n):
            if r != c and not _is_zero(work[r][c]):
                f = work[r][c]
                work[r] = [x - f * y for x, y in zip(work[r], work[c])]
    return [row[n:] for row in work]


def mat_rank(rows: list[list], ctx: QContext) -> int:
    """Rank by elimination (exact) or SVD with relative tolerance (numeric)."""
    if not rows:
        return 0
    if not ctx.exact:
        arr = np.array(rows, dtype=complex)
        s = np.linalg.svd(arr, compute_uv=False)
        if s.size == 0 or s[0] == 0:
            return 0
        return int(np.sum(s > ctx.eps * max(1.0, s[0])))
    work = [list(r) for r in rows]
    ncols = len(work[0])
    rank = 0
    for c in range(ncols):
        p = _pick_pivot([work[r][c] for r in range(len(work))], ctx, rank)
        if p is None:
            continue
        work[rank], work[p] = work[p], work[rank]
        inv = 1 / work[rank][c]
        for r in range(rank + 1, len(work)):
            if not _is_zero(work[r][c]):
                f = work[r][c] * inv
                work[r] = [x - f * y for x, y in zip(work[r], work[rank])]
        rank += 1
        if rank == len(work):
            break
    return rank


def mat_trace(a: list[list], ctx: QContext):
    acc = ctx.zero()
    for i in range(len(a)):
        acc = acc + a[i][i]
    return acc


def to_context(a: Iterable[Iterable], ctx: QContext) -> list[list]:
    """Coerce a dense matrix of rationals / FieldElements / complex into ctx."""
    return [[ctx.const(x) if not isinstance(x, complex) or not ctx.exact else x for x in row] for row in a]


def fraction_or_complex(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return x
