"""Congruence canonical forms of nonsingular bilinear forms.

The canonical form is read off from the Jordan structure of the cosquare
C = M^-T M: a block J_j((-1)^(j+1)) gives Gamma_j, and a pair of blocks
J_k(lam), J_k(1/lam) gives H_2k(lam).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import SingularMatrix, UnpairedEigenvalues, UnsupportedExact
from .linmap import mat_identity, mat_inverse, mat_mul, mat_rank, mat_transpose
from .serialize import format_complex
from .qscalar import DEFAULT_EPS, SAMPLE_V, FieldElement, QContext, specialize


# blocks ------------------------------------------------------------------------


def gamma_block(j: int) -> list[list[int]]:
    """Alternating antidiagonal block: Gamma_1 = (1), Gamma_2 = [[0,-1],[1,1]]."""
    g = [[0] * j for _ in range(j)]
    for i in range(j):
        s = (-1) ** (j + 1 - i)
        g[i][j - 1 - i] = s
        if i >= 1:
            g[i][j - i] = s
    return g


def jordan_block(n: int, lam) -> list[list]:
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        out[i][i] = lam
        if i + 1 < n:
            out[i][i + 1] = 1
    return out


def h_block(k: int, lam) -> list[list]:
    """[[0, I_k], [J_k(lam), 0]]."""
    out = [[0] * (2 * k) for _ in range(2 * k)]
    J = jordan_block(k, lam)
    for i in range(k):
        out[i][k + i] = 1
        for j in range(k):
            out[k + i][j] = J[i][j]
    return out


def build_block(kind: str, size: int, lam=None) -> list[list]:
    """kind in {"Gamma", "H", "J0", "J"}; size is j, k, i or n respectively."""
    if kind == "Gamma":
        return gamma_block(size)
    if kind == "H":
        return h_block(size, lam)
    if kind == "J0":
        return jordan_block(size, 0)
    if kind == "J":
        return jordan_block(size, lam)
    raise ValueError(f"unknown block kind {kind!r}")


def direct_sum(*mats) -> list[list]:
    n = sum(len(m) for m in mats)
    out = [[0] * n for _ in range(n)]
    o = 0
    for m in mats:
        for i, row in enumerate(m):
            for j, x in enumerate(row):
                out[o + i][o + j] = x
        o += len(m)
    return out


# trace statistic ---------------------------------------------------------------------


def _as_ctx(M, ctx: QContext | None) -> QContext:
    if ctx is not None:
        return ctx
    flat = [x for row in M for x in row]
    if any(isinstance(x, (complex, float, np.number)) and not isinstance(x, (int, Fraction)) for x in flat):
        return QContext("numeric", 1.0)
    return QContext.generic()


def _lift(M, ctx: QContext) -> list[list]:
    if ctx.exact:
        return [[FieldElement.coerce(Fraction(x)) if isinstance(x, int) else FieldElement.coerce(x) for x in row] for row in M]
    return [[complex(specialize(x, ctx.v)) if isinstance(x, FieldElement) else complex(x) for x in row] for row in M]


def quantum_trace(M, ctx: QContext | None = None):
    """tr(M^T M^-1) = sum_ij m_ij n_ij."""
    ctx = _as_ctx(M, ctx)
    A = _lift(M, ctx)
    N = mat_inverse(A, ctx)
    acc = ctx.zero()
    for i in range(len(A)):
        for j in range(len(A)):
            acc = acc + A[i][j] * N[i][j]
    return acc


def cosquare(M, ctx: QContext | None = None) -> list[list]:
    ctx = _as_ctx(M, ctx)
    A = _lift(M, ctx)
    N = mat_inverse(A, ctx)
    return mat_mul(mat_transpose(N), A, ctx)


# canonical forms --------------------------------------------------------------------


@dataclass(frozen=True)
class QuadRoot:
    """The pair of roots of a*x^2 + b*x + c, irreducible over the base field."""

    a: FieldElement
    b: FieldElement
    c: FieldElement

    def normalized(self) -> QuadRoot:
        return QuadRoot(FieldElement.one(), self.b / self.a, self.c / self.a)

    def numeric_roots(self, v0: complex = SAMPLE_V) -> list[complex]:
        a, b, c = (specialize(x, v0) for x in (self.a, self.b, self.c))
        d = cmath.sqrt(b * b - 4 * a * c)
        return [(-b + d) / (2 * a), (-b - d) / (2 * a)]

    def __str__(self) -> str:
        return f"root of x^2 + ({self.b / self.a})*x + ({self.c / self.a})"


@dataclass(frozen=True)
class Block:
    kind: str  # "Gamma" | "H" | "J0"
    size: int
    lam: object = None
    mult: int = 1  # used for exact quadratic roots, where one entry stands for the conjugate pair

    def to_json(self) -> dict:
        if self.kind == "Gamma":
            return {"kind": "Gamma", "j": self.size}
        if self.kind == "J0":
            return {"kind": "J0", "i": self.size}
        return {"kind": "H", "k": self.size, "lambda": _lam_text(self.lam)}


def _lam_text(lam) -> str:
    if isinstance(lam, complex):
        return format_complex(lam)
    return str(lam)


@dataclass(frozen=True)
class CanonicalForm:
    blocks: tuple[Block, ...]
    mode: str = "numeric"
    eps: float = field(default=DEFAULT_EPS, compare=False)

    def size(self) -> int:
        return sum(b.size * (2 if b.kind == "H" else 1) * b.mult for b in self.blocks)

    def to_json(self) -> dict:
        out = []
        for b in self.blocks:
            out.extend([b.to_json()] * b.mult)
        return {"blocks": out}

    def same_as(self, other: CanonicalForm, eps: float | None = None) -> bool:
        eps = self.eps if eps is None else eps
        if len(self.blocks) != len(other.blocks):
            return False
        pool = list(other.blocks)
        for b in self.blocks:
            for i, c in enumerate(pool):
                if _block_match(b, c, eps):
                    del pool[i]
                    break
            else:
                return False
        return True


def _block_match(a: Block, b: Block, eps: float) -> bool:
    if (a.kind, a.size, a.mult) != (b.kind, b.size, b.mult):
        return False
    if a.kind != "H":
        return True
    x, y = a.lam, b.lam
    if isinstance(x, complex) or isinstance(y, complex):
        x, y = complex(_num(x)), complex(_num(y))
        tol = 1e3 * eps * max(1.0, abs(x))
        return abs(x - y) < tol or abs(x - 1 / y) < tol
    if isinstance(x, QuadRoot) and isinstance(y, QuadRoot):
        xs, ys = x.normalized(), y.normalized()
        rx = QuadRoot(xs.c / xs.c, xs.b / xs.c, 1 / xs.c).normalized()  # reciprocal pair
        return (xs.b, xs.c) == (ys.b, ys.c) or (rx.b, rx.c) == (ys.b, ys.c)
    if isinstance(x, FieldElement) and isinstance(y, FieldElement):
        return x == y or x == 1 / y
    return False


def _num(x) -> complex:
    if isinstance(x, FieldElement):
        return specialize(x, SAMPLE_V)
    return complex(x)


def _representative(lam: complex) -> complex:
    inv = 1 / lam
    if abs(abs(lam) - 1) < 1e-12:
        return lam if 0 <= cmath.phase(lam) <= math.pi else inv
    return lam if abs(lam) > 1 else inv


def _weyr_sizes(C: np.ndarray, mu: complex, m: int, tol: float) -> list[int] | None:
    """Jordan block sizes of C at eigenvalue mu, or None if ranks are inconsistent."""
    n = C.shape[0]
    A = C - mu * np.eye(n)
    ranks = [n]
    P = np.eye(n, dtype=complex)
    for _ in range(m):
        P = P @ A
        s = np.linalg.svd(P, compute_uv=False)
        ranks.append(int(np.sum(s > tol * max(1.0, s[0]))))
    if ranks[-1] != n - m:
        return None
    ge = [ranks[j - 1] - ranks[j] for j in range(1, m + 1)]  # blocks of size >= j
    sizes = []
    for j in range(1, m + 1):
        nxt = ge[j] if j < m else 0
        cnt = ge[j - 1] - nxt
        if cnt < 0:
            return None
        sizes += [j] * cnt
    if sum(sizes) != m:
        return None
    return sizes


def _clusters(ev: np.ndarray, delta: float) -> list[list[int]]:
    idx = list(range(len(ev)))
    parent = idx[:]

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in idx:
        for j in range(i + 1, len(ev)):
            if abs(ev[i] - ev[j]) < delta:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in idx:
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _clusterings(C: np.ndarray, eps: float, rank_tol: float):
    """Yield (eigenvalue, block sizes) lists from fine to coarse clusterings.

    Only clusterings in which every cluster has a rank profile consistent
    with its size are produced; perturbed Jordan blocks split their
    eigenvalues by roughly err^(1/size), so coarser candidates are tried too.
    """
    ev = np.linalg.eigvals(C)
    scale = max(1.0, float(np.abs(ev).max()))
    delta = 1e3 * eps * scale
    seen = set()
    while delta < 0.5 * scale:
        groups = _clusters(ev, delta)
        key = tuple(sorted(tuple(g) for g in groups))
        delta *= 2
        if key in seen:
            continue
        seen.add(key)
        out = []
        for group in groups:
            mu = complex(np.mean(ev[group]))
            sizes = _weyr_sizes(C, mu, len(group), rank_tol)
            if sizes is None:
                break
            out.append((mu, sizes))
        else:
            yield out


def jordan_structure(C: np.ndarray, eps: float = DEFAULT_EPS) -> list[tuple[complex, list[int]]]:
    """[(eigenvalue, block sizes)] from the coarsest consistent clustering."""
    best = None
    for best in _clusterings(C, eps, _rank_tol(C, eps)):
        pass
    if best is None:
        raise UnpairedEigenvalues("eigenvalue clustering failed; try a smaller eps or exact mode")
    return best


def _rank_tol(A: np.ndarray, eps: float) -> float:
    u = np.finfo(float).eps
    return max(1e2 * eps, 1e2 * u * float(np.linalg.cond(A)) ** 2)


def _assemble(structure, tol: float) -> list[Block]:
    blocks: list[Block] = []
    pending = []
    for mu, sizes in structure:
        for sgn in (1, -1):
            if abs(mu - sgn) < tol:
                break
        else:
            pending.append((mu, sizes))
            continue
        counts: dict[int, int] = {}
        for j in sizes:
            counts[j] = counts.get(j, 0) + 1
        for j, c in sorted(counts.items()):
            if sgn == (-1) ** (j + 1):
                blocks += [Block("Gamma", j)] * c
            else:
                if c % 2:
                    raise UnpairedEigenvalues(f"odd number of J_{j}({sgn}) blocks")
                blocks += [Block("H", j, complex(sgn))] * (c // 2)
    used = [False] * len(pending)
    for i, (mu, sizes) in enumerate(pending):
        if used[i]:
            continue
        used[i] = True
        for j in range(len(pending)):
            nu, sz = pending[j]
            if not used[j] and abs(mu * nu - 1) < tol * max(1.0, abs(mu), abs(nu)) and sorted(sz) == sorted(sizes):
                used[j] = True
                lam = _representative(0.5 * (mu + 1 / nu))
                blocks += [Block("H", k, lam) for k in sorted(sizes)]
                break
        else:
            raise UnpairedEigenvalues(f"eigenvalue {mu} has no partner 1/lambda")
    return blocks


def _canonical_numeric(M, eps: float) -> CanonicalForm:
    A = np.array(M, dtype=complex)
    n = A.shape[0]
    if n == 0:
        return CanonicalForm((), "numeric", eps)
    if np.linalg.matrix_rank(A, tol=eps * max(1.0, np.abs(A).max())) < n:
        raise SingularMatrix("canonical_form needs a nonsingular matrix")
    C = np.linalg.inv(A).T @ A
    rank_tol = _rank_tol(A, eps)
    # eigenvalue matching tolerance: a size-m cluster mean is accurate to about rank_tol^(1/2)
    tol = max(1e3 * eps, float(np.sqrt(rank_tol)))
    best = None
    err: Exception | None = None
    for structure in _clusterings(C, eps, rank_tol):
        try:
            best = _assemble(structure, tol)
        except UnpairedEigenvalues as e:
            err = e
    if best is None:
        raise err or UnpairedEigenvalues("eigenvalue clustering failed; try a smaller eps or exact mode")
    return CanonicalForm(_sorted_blocks(best), "numeric", eps)


def _sorted_blocks(blocks) -> tuple[Block, ...]:
    def key(b: Block):
        if b.kind == "Gamma":
            return (0, b.size, 0.0, 0.0, "")
        z = _num(b.lam) if not isinstance(b.lam, QuadRoot) else b.lam.numeric_roots()[0]
        return (1, b.size, round(abs(z), 9), round(cmath.phase(z), 9), str(b.lam))

    return tuple(sorted(blocks, key=key))


def canonical_form(M, mode: str = "numeric", ctx: QContext | None = None, eps: float | None = None) -> CanonicalForm:
    """Congruence canonical form of a nonsingular matrix.

    numeric: entries are complex (FieldElements are specialized at ctx.v).
    exact: entries are rationals or elements of Q(v); the cosquare's
    characteristic polynomial must split into factors of degree <= 2.
    """
    if eps is None:
        eps = ctx.eps if ctx is not None else DEFAULT_EPS
    if mode == "numeric":
        v0 = ctx.v if ctx is not None and not ctx.exact else None
        rows = []
        for row in M:
            r = []
            for x in row:
                if isinstance(x, FieldElement):
                    if v0 is None:
                        raise UnsupportedExact("numeric mode needs a numeric q for symbolic entries")
                    r.append(specialize(x, v0))
                else:
                    r.append(complex(x))
            rows.append(r)
        return _canonical_numeric(rows, eps)
    if mode == "exact":
        return _canonical_exact(M, ctx or QContext.generic())
    raise ValueError(f"unknown mode {mode!r}")


def congruent(A, B, mode: str = "numeric", ctx: QContext | None = None, eps: float | None = None) -> bool:
    if len(A) != len(B):
        return False
    fa = canonical_form(A, mode, ctx, eps)
    fb = canonical_form(B, mode, ctx, eps)
    return fa.same_as(fb)


# exact mode ---------------------------------------------------------------------------


def _to_sympy(x, vsym):
    import sympy

    x = FieldElement.coerce(Fraction(x) if isinstance(x, int) else x)
    num = sum(sympy.Rational(c.numerator, c.denominator) * vsym**e for e, c in x.num.coeffs.items())
    den = sum(sympy.Rational(c.numerator, c.denominator) * vsym**e for e, c in x.den.coeffs.items())
    return num / den


def _from_sympy(expr, vsym) -> FieldElement:
    import sympy

    from .qscalar import LaurentPoly

    num, den = sympy.fraction(sympy.together(sympy.expand(expr)))

    def conv(p):
        poly = sympy.Poly(sympy.expand(p), vsym)
        return LaurentPoly({m[0]: Fraction(int(c.p), int(c.q)) for m, c in zip(poly.monoms(), poly.coeffs())})

    return FieldElement(conv(num), conv(den))


def _canonical_exact(M, ctx: QContext) -> CanonicalForm:
    import sympy

    A = _lift(M, ctx)
    n = len(A)
    C = mat_mul(mat_transpose(mat_inverse(A, ctx)), A, ctx)
    vs, xs = sympy.symbols("v x")
    Cs = sympy.Matrix(n, n, lambda i, j: _to_sympy(C[i][j], vs))
    cp = sympy.together(Cs.charpoly(xs).as_expr())
    num, _ = sympy.fraction(cp)
    _, factors = sympy.factor_list(sympy.expand(num), xs, vs)
    facs = []
    for f, mult in factors:
        deg = sympy.degree(f, xs)
        if deg == 0:
            continue
        if deg > 2:
            raise UnsupportedExact("cosquare has an irreducible factor of degree > 2")
        coeffs = [_from_sympy(c, vs) for c in sympy.Poly(f, xs).all_coeffs()]
        facs.append((coeffs, mult))
    ident = mat_identity(n, ctx)
    blocks: list[Block] = []
    info = []
    for coeffs, mult in facs:
        # f(C) by Horner
        F = [[ctx.zero()] * n for _ in range(n)]
        for c in coeffs:
            F = mat_mul(F, C, ctx)
            F = [[F[i][j] + (c if i == j else 0) for j in range(n)] for i in range(n)]
        d = len(coeffs) - 1
        ranks = [n]
        P = ident
        for _ in range(mult):
            P = mat_mul(P, F, ctx)
            ranks.append(mat_rank(P, ctx))
        ge = [(ranks[j - 1] - ranks[j]) // d for j in range(1, mult + 1)]
        sizes = []
        for j in range(1, mult + 1):
            nxt = ge[j] if j < mult else 0
            sizes += [j] * (ge[j - 1] - nxt)
        info.append((coeffs, sizes))
    used = [False] * len(info)
    for i, (coeffs, sizes) in enumerate(info):
        if used[i]:
            continue
        used[i] = True
        lead = coeffs[0]
        mon = [c / lead for c in coeffs]
        if len(mon) == 2:
            lam = -mon[1]
            for sgn in (1, -1):
                if lam == sgn:
                    counts: dict[int, int] = {}
                    for j in sizes:
                        counts[j] = counts.get(j, 0) + 1
                    for j, c in sorted(counts.items()):
                        if sgn == (-1) ** (j + 1):
                            blocks += [Block("Gamma", j)] * c
                        elif c % 2:
                            raise UnpairedEigenvalues(f"odd number of J_{j}({sgn}) blocks")
                        else:
                            blocks += [Block("H", j, FieldElement.from_rational(sgn))] * (c // 2)
                    break
            else:
                j = _find_partner(info, used, lambda cf: len(cf) == 2 and -cf[1] / cf[0] == 1 / lam)
                if j is None or sorted(info[j][1]) != sorted(sizes):
                    raise UnpairedEigenvalues(f"no partner for eigenvalue {lam}")
                used[j] = True
                rep = lam if abs(specialize(lam, _probe(ctx))) >= 1 else 1 / lam
                blocks += [Block("H", k, rep) for k in sorted(sizes)]
        else:
            b, c = mon[1], mon[2]
            root = QuadRoot(FieldElement.one(), b, c)
            if c == 1:
                # roots lam and 1/lam of the same factor pair up with each other
                blocks += [Block("H", k, root) for k in sorted(sizes)]
            else:
                j = _find_partner(info, used, lambda cf: len(cf) == 3 and cf[1] / cf[2] == b / c and cf[0] / cf[2] == 1 / c)
                if j is None or sorted(info[j][1]) != sorted(sizes):
                    raise UnpairedEigenvalues("no reciprocal partner for a quadratic factor")
                used[j] = True
                blocks += [Block("H", k, root, mult=2) for k in sorted(sizes)]
    return CanonicalForm(_sorted_blocks(blocks), "exact")


def _probe(ctx: QContext) -> complex:
    return SAMPLE_V if ctx.symbolic else complex(ctx.v.constant_value())


def _find_partner(info, used, pred) -> int | None:
    for j, (coeffs, _) in enumerate(info):
        if not used[j] and pred(coeffs):
            return j
    return None
