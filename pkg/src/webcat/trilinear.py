"""Invariants of 3x3x3 trilinear forms: slice cubics, their projective types,
and the number of rank-one slices.

Projective types of plane cubics:
    1: x^3            2: x^2 y          3: xy(x - y)      4: xyz
    5: z(x^2 + yz)    6: x(x^2 + yz)    7: x^3 - y^2 z    8: x^3 + y^3 - xyz
    9: smooth (elliptic, with j-invariant)                10: zero
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from .errors import BadDims, Inconclusive, IrrationalSingularPoint

X, Y, Z = sympy.symbols("x y z")
GENS = (X, Y, Z)
AXES = ("x", "y", "z")
INF = math.inf


# tensors --------------------------------------------------------------------------


def as_array(T) -> list:
    """Nested 3x3x3 list of Fractions from a Tensor3, nested list or numpy array."""
    if hasattr(T, "dims") and hasattr(T, "entries"):
        if tuple(T.dims) != (3, 3, 3):
            raise BadDims(f"expected a 3x3x3 tensor, got {tuple(T.dims)}")
        out = [[[Fraction(0)] * 3 for _ in range(3)] for _ in range(3)]
        for (i, j, k), v in T.entries.items():
            out[i][j][k] = _rational(v)
        return out
    arr = np.asarray(T, dtype=object)
    if arr.shape != (3, 3, 3):
        raise BadDims(f"expected a 3x3x3 tensor, got shape {arr.shape}")
    return [[[_rational(arr[i, j, k]) for k in range(3)] for j in range(3)] for i in range(3)]


def _rational(v) -> Fraction:
    from .qscalar import FieldElement

    if isinstance(v, FieldElement):
        if not v.is_constant():
            raise BadDims("trilinear classification needs rational entries; specialize q first")
        return v.constant_value()
    if isinstance(v, sympy.Basic):
        v = sympy.Rational(v)
        return Fraction(int(v.p), int(v.q))
    return Fraction(v)


def transform(T, A, B, C) -> list:
    """Change of basis in the three slots: t'_abc = sum A_ia B_jb C_kc t_ijk."""
    t = np.array(as_array(T), dtype=object)
    A, B, C = (np.array([[Fraction(x) for x in row] for row in m], dtype=object) for m in (A, B, C))
    out = np.einsum("ia,jb,kc,ijk->abc", A, B, C, t, optimize="greedy")
    return out.tolist()


def permute_slots(T, perm) -> list:
    t = np.array(as_array(T), dtype=object)
    return np.transpose(t, perm).tolist()


def diagonal_tensor() -> list:
    t = [[[Fraction(0)] * 3 for _ in range(3)] for _ in range(3)]
    for i in range(3):
        t[i][i][i] = Fraction(1)
    return t


def veronese_cuboid_array() -> list:
    """The cuboid with t_123 = t_213 = t_321 = -1 and t_132 = t_231 = t_312 = 1 (1-based)."""
    t = [[[Fraction(0)] * 3 for _ in range(3)] for _ in range(3)]
    for (i, j, k), v in {(0, 1, 2): -1, (0, 2, 1): 1, (1, 0, 2): -1, (1, 2, 0): 1, (2, 1, 0): -1, (2, 0, 1): 1}.items():
        t[i][j][k] = Fraction(v)
    return t


def slice_matrix(T, axis: str) -> sympy.Matrix:
    """Contract one slot with (x, y, z); the other two index the matrix."""
    t = as_array(T)
    if axis not in AXES:
        raise BadDims(f"axis must be one of {AXES}")
    a = GENS
    out = sympy.zeros(3, 3)
    for i in range(3):
        for j in range(3):
            if axis == "x":
                e = sum(sympy.Rational(t[h][i][j]) * a[h] for h in range(3))
            elif axis == "y":
                e = sum(sympy.Rational(t[i][h][j]) * a[h] for h in range(3))
            else:
                e = sum(sympy.Rational(t[i][j][h]) * a[h] for h in range(3))
            out[i, j] = e
    return out


# cubics ----------------------------------------------------------------------------


@dataclass(frozen=True)
class TernaryCubic:
    """Homogeneous cubic in x, y, z with rational coefficients."""

    coeffs: tuple  # sorted ((ex, ey, ez), Fraction) pairs with nonzero values

    @classmethod
    def from_expr(cls, expr) -> TernaryCubic:
        expr = sympy.expand(sympy.sympify(expr))
        if expr == 0:
            return cls(())
        poly = sympy.Poly(expr, *GENS)
        items = []
        for mon, c in zip(poly.monoms(), poly.coeffs()):
            if sum(mon) != 3:
                raise BadDims("cubic must be homogeneous of degree 3")
            c = sympy.Rational(c)
            items.append((tuple(mon), Fraction(int(c.p), int(c.q))))
        return cls(tuple(sorted(items)))

    @property
    def expr(self):
        return sum((sympy.Rational(c.numerator, c.denominator) * X**e[0] * Y**e[1] * Z**e[2] for e, c in self.coeffs), sympy.Integer(0))

    def is_zero(self) -> bool:
        return not self.coeffs

    def substitute(self, A) -> TernaryCubic:
        """F(A (x, y, z)^T) for a 3x3 matrix A."""
        A = sympy.Matrix(A)
        new = A * sympy.Matrix(GENS)
        return TernaryCubic.from_expr(self.expr.subs(dict(zip(GENS, new)), simultaneous=True))

    def symmetric_tensor(self) -> np.ndarray:
        """Symmetric a_ijk with F = sum a_ijk x_i x_j x_k."""
        a = np.empty((3, 3, 3), dtype=object)
        a[...] = Fraction(0)
        cmap = dict(self.coeffs)
        for idx in itertools.product(range(3), repeat=3):
            e = tuple(idx.count(i) for i in range(3))
            mult = math.factorial(3) // math.prod(math.factorial(k) for k in e)
            a[idx] = cmap.get(e, Fraction(0)) / mult
        return a

    def __str__(self) -> str:
        return str(self.expr)


def slice_cubic(T, axis: str) -> TernaryCubic:
    return TernaryCubic.from_expr(slice_matrix(T, axis).det(method="berkowitz"))


# invariants of smooth cubics -----------------------------------------------------------------


def _levi_civita() -> np.ndarray:
    e = np.zeros((3, 3, 3), dtype=object)
    for p in itertools.permutations(range(3)):
        inversions = sum(1 for a in range(3) for b in range(a + 1, 3) if p[a] > p[b])
        e[p] = -1 if inversions % 2 else 1
    return e


_EPS3 = _levi_civita()


def _chain(first, steps):
    """Contract pairwise along a fixed path; keeps intermediates at <= 3^5 entries."""
    acc = first
    for spec, arr in steps:
        acc = np.einsum(spec, acc, arr)
    return Fraction(np.asarray(acc).item())


def aronhold_s(c: TernaryCubic) -> Fraction:
    """Degree-4 invariant, symbolically (abc)(abd)(acd)(bcd)."""
    a, e = c.symmetric_tensor(), _EPS3
    # letters a=ijk, b=lmn, c=opq, d=rst; brackets ilo, jmr, kps, nqt
    return _chain(a, [
        ("ijk,ilo->jklo", e),
        ("jklo,lmn->jkomn", a),
        ("jkomn,jmr->konr", e),
        ("konr,opq->knrpq", a),
        ("knrpq,kps->nrqs", e),
        ("nrqs,rst->nqt", a),
        ("nqt,nqt->", e),
    ])


def aronhold_t(c: TernaryCubic) -> Fraction:
    """Degree-6 invariant, symbolically (abc)(abd)(ace)(bcf)(def)^2."""
    a, e = c.symmetric_tensor(), _EPS3
    # letters a=ABC, b=DEF, c=GHI, d=JKL, e=MNO, f=PQR
    return _chain(a, [
        ("ABC,ADG->BCDG", e),
        ("BCDG,DEF->BCGEF", a),
        ("BCGEF,BEJ->CGFJ", e),
        ("CGFJ,GHI->CFJHI", a),
        ("CFJHI,CHM->FJIM", e),
        ("FJIM,FIP->JMP", e),
        ("JMP,JKL->MPKL", a),
        ("MPKL,MNO->PKLNO", a),
        ("PKLNO,KNQ->PLOQ", e),
        ("PLOQ,PQR->LOR", a),
        ("LOR,LOR->", e),
    ])


_CAL: dict = {}


def _calibration() -> tuple[Fraction, Fraction]:
    """S and T on the Weierstrass cubics y^2 z - x^3 - x z^2 and y^2 z - x^3 - z^3."""
    if not _CAL:
        s1 = aronhold_s(TernaryCubic.from_expr(Y**2 * Z - X**3 - X * Z**2))
        t1 = aronhold_t(TernaryCubic.from_expr(Y**2 * Z - X**3 - Z**3))
        _CAL["s"], _CAL["t"] = s1, t1
    return _CAL["s"], _CAL["t"]


def j_invariant(c: TernaryCubic) -> Fraction:
    """j normalized so that y^2 z = x^3 + a x z^2 + b z^3 has j = 1728 4a^3/(4a^3 + 27b^2)."""
    sig, tau = _calibration()
    S, T = aronhold_s(c), aronhold_t(c)
    num = 4 * S**3 * tau**2
    den = 4 * S**3 * tau**2 + 27 * T**2 * sig**3
    if den == 0:
        raise ValueError("cubic is singular")
    return 1728 * num / den


# singular points -----------------------------------------------------------------------------


def _univariate_root_count(p, var) -> int:
    p = sympy.Poly(p, var)
    if p.is_zero:
        return INF
    sq = sympy.sqf_part(p)
    return sq.degree()


def _count_points_2d(polys, u, w) -> float:
    """Distinct common zeros in C^2, or INF if positive-dimensional."""
    polys = [p for p in (sympy.expand(p) for p in polys) if p != 0]
    if not polys:
        return INF
    G = sympy.groebner(polys, u, w, order="grevlex")
    if list(G.exprs) == [1]:
        return 0
    if not G.is_zero_dimensional:
        return INF
    t = sympy.Symbol("t_sep")
    best = 0
    for c in (1, 3, -7, sympy.Rational(11, 5), 17):
        H = sympy.groebner(list(G.exprs) + [t - u - c * w], u, w, t, order="lex")
        last = [g for g in H.exprs if g.free_symbols <= {t}]
        if not last:
            continue
        best = max(best, _univariate_root_count(last[-1], t))
    return best


def _chart_systems(polys):
    """Affine pieces of P^2: z = 1 (in x, y), then z = 0, y = 1 (in x), then (1:0:0)."""
    c1 = [p.subs(Z, 1) for p in polys]
    c2 = [p.subs({Z: 0, Y: 1}) for p in polys]
    c3 = [p.subs({Z: 0, Y: 0, X: 1}) for p in polys]
    return c1, c2, c3


def count_projective_points(polys) -> float:
    """Distinct common zeros of homogeneous polynomials in P^2 (INF if infinite)."""
    polys = [sympy.expand(p) for p in polys]
    c1, c2, c3 = _chart_systems(polys)
    n1 = _count_points_2d(c1, X, Y)
    if n1 == INF:
        return INF
    nz = [sympy.Poly(p, X) for p in c2 if sympy.expand(p) != 0]
    if nz:
        g = nz[0]
        for p in nz[1:]:
            g = sympy.gcd(g, p)
        n2 = sympy.sqf_part(g).degree() if not g.is_zero else 0
    else:
        return INF
    n3 = 1 if all(sympy.expand(p) == 0 for p in c3) else 0
    return n1 + n2 + n3


def singular_points(c: TernaryCubic) -> float:
    F = c.expr
    return count_projective_points([sympy.diff(F, v) for v in GENS])


def _rational_singular_point(c: TernaryCubic) -> tuple:
    F = c.expr
    grads = [sympy.diff(F, v) for v in GENS]
    c1, c2, c3 = _chart_systems(grads)
    sols = sympy.solve(c1, [X, Y], dict=True)
    for s in sols:
        pt = (s.get(X, X), s.get(Y, Y), sympy.Integer(1))
        if all(sympy.sympify(v).is_rational for v in pt):
            return pt
    sols = sympy.solve(c2, [X], dict=True)
    for s in sols:
        pt = (s.get(X, X), sympy.Integer(1), sympy.Integer(0))
        if all(sympy.sympify(v).is_rational for v in pt):
            return pt
    if all(sympy.expand(p) == 0 for p in c3):
        return (sympy.Integer(1), sympy.Integer(0), sympy.Integer(0))
    raise IrrationalSingularPoint("singular point is not rational")


def _local_data(c: TernaryCubic, pt) -> tuple[int, bool]:
    """(multiplicity, tangent cone is a double line) at a rational point."""
    p = sympy.Matrix(pt)
    cols = [p]
    for e in (sympy.Matrix([1, 0, 0]), sympy.Matrix([0, 1, 0]), sympy.Matrix([0, 0, 1])):
        trial = sympy.Matrix.hstack(*cols, e)
        if trial.rank() == len(cols) + 1:
            cols.append(e)
        if len(cols) == 3:
            break
    A = sympy.Matrix.hstack(cols[1], cols[2], cols[0])  # the point goes to (0:0:1)
    G = sympy.expand(c.substitute(A).expr.subs(Z, 1))
    poly = sympy.Poly(G, X, Y)
    m = min(sum(mon) for mon in poly.monoms())
    cone = sum(coef * X**mon[0] * Y**mon[1] for mon, coef in zip(poly.monoms(), poly.coeffs()) if sum(mon) == m)
    doubled = False
    if m == 2:
        q = sympy.Poly(cone, X, Y)
        a = q.coeff_monomial(X**2)
        b = q.coeff_monomial(X * Y)
        cc = q.coeff_monomial(Y**2)
        doubled = b * b - 4 * a * cc == 0
    return m, doubled


@dataclass(frozen=True)
class CubicType:
    tag: int
    j: Fraction | None = None

    def to_json(self):
        if self.tag == 9 and self.j is not None:
            return {"type": 9, "j": str(self.j)}
        return self.tag


def classify_cubic(c) -> CubicType:
    if not isinstance(c, TernaryCubic):
        c = TernaryCubic.from_expr(c)
    if c.is_zero():
        return CubicType(10)
    F = c.expr
    _, factors = sympy.factor_list(F, *GENS)
    sqf_degree = sum(sympy.Poly(f, *GENS).total_degree() for f, _ in factors)
    if sqf_degree == 1:
        return CubicType(1)
    if sqf_degree == 2:
        return CubicType(2)
    ns = singular_points(c)
    if ns == 0:
        return CubicType(9, j_invariant(c))
    if ns == 3:
        return CubicType(4)
    if ns == 2:
        return CubicType(6)
    if ns != 1:
        raise ValueError(f"reduced cubic with {ns} singular points")
    m, doubled = _local_data(c, _rational_singular_point(c))
    if m == 3:
        return CubicType(3)
    if not doubled:
        return CubicType(8)
    has_line = any(sympy.Poly(f, *GENS).total_degree() == 1 for f, _ in factors)
    return CubicType(5 if has_line else 7)


CANONICAL_CUBICS = {
    1: X**3,
    2: X**2 * Y,
    3: X * Y * (X - Y),
    4: X * Y * Z,
    5: Z * (X**2 + Y * Z),
    6: X * (X**2 + Y * Z),
    7: X**3 - Y**2 * Z,
    8: X**3 + Y**3 - X * Y * Z,
    10: sympy.Integer(0),
}


# rank-one slices ------------------------------------------------------------------------------


def _minors(S: sympy.Matrix) -> list:
    out = []
    for r in itertools.combinations(range(3), 2):
        for cc in itertools.combinations(range(3), 2):
            out.append(sympy.expand(S.extract(list(r), list(cc)).det()))
    return out


def _kernel_dim(T, axis: str) -> int:
    """Dimension of {a : slice(a) = 0}."""
    S = slice_matrix(T, axis)
    rows = [[sympy.Poly(S[i, j], *GENS).coeff_monomial(v) for v in GENS] for i in range(3) for j in range(3)]
    return 3 - sympy.Matrix(rows).rank()


def rank_one_count(T, axis: str) -> float:
    """Number of points [a] in P^2 where the slice has rank exactly one (INF if infinite)."""
    S = slice_matrix(T, axis)
    k = _kernel_dim(T, axis)
    if k == 3:
        return 0
    if k == 2:
        # every entry is a multiple of one linear form l, so slice = l * S0
        S0 = None
        for pt in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
            val = S.subs(dict(zip(GENS, pt)))
            if any(x != 0 for x in val):
                S0 = val
                break
        return INF if S0.rank() == 1 else 0
    total = count_projective_points(_minors(S))
    if total == INF:
        return INF
    return total - (1 if k == 1 else 0)


# finite-field oracle ---------------------------------------------------------------------------


def _slices_mod_p(T, axis: str, p: int) -> np.ndarray:
    """S_h mod p, shape (3, 3, 3): S(a) = sum_h a_h S_h."""
    t = as_array(T)
    out = np.zeros((3, 3, 3), dtype=np.int64)
    for h in range(3):
        for i in range(3):
            for j in range(3):
                if axis == "x":
                    v = t[h][i][j]
                elif axis == "y":
                    v = t[i][h][j]
                else:
                    v = t[i][j][h]
                out[h, i, j] = v.numerator * pow(v.denominator, -1, p) % p
    return out


def _rank_one_mask(E: np.ndarray, p: int) -> np.ndarray:
    """E has shape (..., 3, 3); True where the matrix has rank exactly one mod p."""
    ok = np.ones(E.shape[:-2], dtype=bool)
    for r0, r1 in itertools.combinations(range(3), 2):
        for c0, c1 in itertools.combinations(range(3), 2):
            m = (E[..., r0, c0] * E[..., r1, c1] - E[..., r0, c1] * E[..., r1, c0]) % p
            ok &= m == 0
    nonzero = np.any(E % p != 0, axis=(-2, -1))
    return ok & nonzero


def brute_force_rank_one_count(T, axis: str, p: int) -> int:
    """Rank-one slices over the projective plane of F_p, by scanning every point."""
    S = _slices_mod_p(T, axis, p)
    count = 0
    r = np.arange(p, dtype=np.int64)
    for a1 in range(p):
        # chart a = (a1, a2, 1)
        E = (a1 * S[0] + S[2])[None] + r[:, None, None] * S[1][None]
        count += int(_rank_one_mask(E % p, p).sum())
    # a = (a1, 1, 0)
    E = S[1][None] + r[:, None, None] * S[0][None]
    count += int(_rank_one_mask(E % p, p).sum())
    count += int(_rank_one_mask(S[0][None] % p, p).sum())
    return count


def _trim(f: list, p: int) -> list:
    f = [c % p for c in f]
    while f and f[-1] == 0:
        f.pop()
    return f


def _polymod(f: list, g: list, p: int) -> list:
    f = f[:]
    inv = pow(g[-1], -1, p)
    while len(f) >= len(g):
        c = f[-1] * inv % p
        shift = len(f) - len(g)
        for i, gc in enumerate(g):
            f[shift + i] = (f[shift + i] - c * gc) % p
        f = _trim(f, p)
    return f


def _polygcd(f: list, g: list, p: int) -> list:
    while g:
        f, g = g, _polymod(f, g, p)
    return f


def _distinct_roots(f: list, p: int) -> int:
    """Distinct roots in F_p of a polynomial of degree <= 2 (p odd)."""
    if len(f) <= 1:
        return 0
    if len(f) == 2:
        return 1
    c, b, a = f
    disc = (b * b - 4 * a * c) % p
    if disc == 0:
        return 1
    return 2 if pow(disc, (p - 1) // 2, p) == 1 else 0


def _line_count(B: np.ndarray, C: np.ndarray, p: int) -> int:
    """Number of s in F_p with s*B + C of rank exactly one."""
    g: list = []
    for r0, r1 in itertools.combinations(range(3), 2):
        for c0, c1 in itertools.combinations(range(3), 2):
            # (s B00 + C00)(s B11 + C11) - (s B01 + C01)(s B10 + C10)
            b00, b11, b01, b10 = B[r0, c0], B[r1, c1], B[r0, c1], B[r1, c0]
            k00, k11, k01, k10 = C[r0, c0], C[r1, c1], C[r0, c1], C[r1, c0]
            f = _trim([
                int(k00 * k11 - k01 * k10),
                int(b00 * k11 + k00 * b11 - b01 * k10 - k01 * b10),
                int(b00 * b11 - b01 * b10),
            ], p)
            g = _polygcd(g, f, p) if g else f
    # values of s where the matrix vanishes
    if not (B % p).any():
        zeros = p if not (C % p).any() else 0
    else:
        i, j = np.argwhere(B % p)[0]
        s = int(-C[i, j] * pow(int(B[i, j]), -1, p) % p)
        zeros = 1 if not ((s * B + C) % p).any() else 0
    if not g:
        return p - zeros
    return _distinct_roots(g, p) - zeros


def sweep_rank_one_count(T, axis: str, p: int) -> int:
    """Rank-one slices over P^2(F_p), one line a_1 = const at a time."""
    S = _slices_mod_p(T, axis, p)
    count = 0
    for a1 in range(p):
        count += _line_count(S[1], (a1 * S[0] + S[2]) % p, p)
    count += _line_count(S[0], S[1], p)
    count += int(_rank_one_mask(S[0][None] % p, p).sum())
    return count


def finite_field_rank_one_count(T, axis: str, p: int) -> int:
    """Full scan for small p, line sweep otherwise."""
    if p <= 1000:
        return brute_force_rank_one_count(T, axis, p)
    return sweep_rank_one_count(T, axis, p)


# equivalence ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class TrilinearInvariants:
    counts: tuple
    types: tuple

    def to_json(self) -> dict:
        return {
            "counts": ["inf" if c == INF else int(c) for c in self.counts],
            "types": [t.to_json() for t in self.types],
        }


def invariants(T) -> TrilinearInvariants:
    counts = tuple(rank_one_count(T, a) for a in AXES)
    types = tuple(classify_cubic(slice_cubic(T, a)) for a in AXES)
    return TrilinearInvariants(counts, types)


def equivalent(T, U) -> bool:
    """Compare counts and types up to a simultaneous permutation of the axes.

    Raises Inconclusive when a match needs two elliptic cubics with equal j.
    """
    a, b = invariants(T), invariants(U)
    inconclusive = False
    for perm in itertools.permutations(range(3)):
        if any(a.counts[i] != b.counts[p] for i, p in enumerate(perm)):
            continue
        if any(a.types[i].tag != b.types[p].tag for i, p in enumerate(perm)):
            continue
        elliptic = [(a.types[i], b.types[p]) for i, p in enumerate(perm) if a.types[i].tag == 9]
        if any(x.j != y.j for x, y in elliptic):
            continue
        if elliptic:
            inconclusive = True
            continue
        return True
    if inconclusive:
        raise Inconclusive("invariants agree, including j-invariants of smooth slice cubics")
    return False


def random_sparse_tensor(rng: random.Random, nonzeros: int = 5, lo: int = -3, hi: int = 3) -> list:
    t = [[[Fraction(0)] * 3 for _ in range(3)] for _ in range(3)]
    cells = rng.sample([(i, j, k) for i in range(3) for j in range(3) for k in range(3)], nonzeros)
    for i, j, k in cells:
        v = 0
        while v == 0:
            v = rng.randint(lo, hi)
        t[i][j][k] = Fraction(v)
    return t
