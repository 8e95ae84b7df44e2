"""Solutions of the trace equation tr(M^T M^-1) = target, up to congruence.

A congruence class is a block structure (Gamma_j's and H_2k(lam)'s); the
trace is additive with tr(Gamma_j) = (-1)^(j+1) j and tr(H_2k(lam)) =
k (lam + 1/lam).  Everything here works over a "q value": the symbolic q of
Q(v), a rational number, or a complex number.
"""
from __future__ import annotations

import cmath
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .congruence import direct_sum, gamma_block, h_block, quantum_trace
from .errors import NoSolution, UndefinedAtQ
from .qscalar import DEFAULT_EPS, SAMPLE_V, FieldElement, parse_complex, parse_field, specialize

CATEGORIES = ("sl2", "gl2", "so3")


# q values ---------------------------------------------------------------------------


def parse_q(q):
    """"generic" -> symbolic q; ints/Fractions/rational strings -> exact; else complex."""
    if isinstance(q, FieldElement):
        return q
    if q is None or (isinstance(q, str) and q.strip() == "generic"):
        return FieldElement.q()
    if isinstance(q, (int, Fraction)):
        return FieldElement.from_rational(q)
    if isinstance(q, str):
        s = q.strip()
        try:
            return FieldElement.from_rational(Fraction(s))
        except ValueError:
            return parse_complex(s)
    return complex(q)


def is_exact(q) -> bool:
    return isinstance(q, FieldElement)


def is_generic(q) -> bool:
    return isinstance(q, FieldElement) and not q.is_constant()


def qnum(k: int, q):
    """[k] as a function of q: sum of q^(k-1-2i)."""
    sign = 1 if k >= 0 else -1
    k = abs(k)
    acc = 0
    for i in range(k):
        acc = acc + q ** (k - 1 - 2 * i)
    return sign * acc if k else (FieldElement.zero() if is_exact(q) else 0j)


def target(category: str, q):
    if category == "sl2":
        return -qnum(2, q)
    if category == "gl2":
        return qnum(2, q)
    if category == "so3":
        if _is_zero(q**2 + q**-2):
            raise UndefinedAtQ("so3 needs q^2 + q^-2 != 0")
        return qnum(3, q)
    raise ValueError(f"unknown category {category!r}")


def _is_zero(x, eps: float = DEFAULT_EPS) -> bool:
    if isinstance(x, FieldElement):
        return x.is_zero()
    return abs(x) < eps


def _const(c, q):
    return FieldElement.from_rational(c) if is_exact(q) else complex(c)


def _numeric_q(q) -> complex:
    if isinstance(q, FieldElement):
        return specialize(q, SAMPLE_V) if not q.is_constant() else complex(q.constant_value())
    return complex(q)


# block structures ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class BlockStructure:
    gammas: tuple[int, ...]
    hs: tuple[int, ...]

    @property
    def size(self) -> int:
        return sum(self.gammas) + 2 * sum(self.hs)

    def gamma_trace(self) -> int:
        return sum((-1) ** (j + 1) * j for j in self.gammas)

    def to_json(self) -> dict:
        return {"gamma": list(self.gammas), "h": list(self.hs)}

    def __str__(self) -> str:
        parts = [f"Gamma_{j}" for j in self.gammas] + [f"H_{2 * k}" for k in self.hs]
        return " + ".join(parts) if parts else "empty"


def _partitions(n: int, maxpart: int | None = None):
    if maxpart is None:
        maxpart = n
    if n == 0:
        yield ()
        return
    for p in range(min(n, maxpart), 0, -1):
        for rest in _partitions(n - p, p):
            yield (p,) + rest


def block_structures(n: int) -> list[BlockStructure]:
    out = []
    for hsum in range(n // 2 + 1):
        for hs in _partitions(hsum):
            for gs in _partitions(n - 2 * hsum):
                out.append(BlockStructure(tuple(sorted(gs)), tuple(sorted(hs))))
    return sorted(out)


# families ---------------------------------------------------------------------------------


@dataclass
class SolutionFamily:
    """One congruence family of solutions.

    kind "gamma": no H-blocks, the structure alone solves the equation.
    kind "explicit": one H-block, lam is a root of a*x^2 + b*x + c
        (roots given when they lie in the base field).
    kind "parametric": r >= 2 H-blocks; the first r-1 lambdas are free and the
        last solves k_r x^2 + (g + sum k_b (mu_b + 1/mu_b) - t) x + k_r = 0.
    """

    category: str
    structure: BlockStructure
    kind: str
    q: object
    quadratic: tuple | None = None
    roots: tuple | None = None
    free: int = 0
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"structure": self.structure.to_json(), "kind": self.kind}
        if self.quadratic is not None:
            out["quadratic"] = [_fmt(c) for c in self.quadratic]
        if self.roots is not None:
            out["lambda"] = [_fmt(r) for r in self.roots]
        if self.kind == "parametric":
            out["free_parameters"] = self.free
            out["residual"] = (
                f"{self.structure.hs[-1]}*x^2 + (g + sum k_b*(mu_b + 1/mu_b) - t)*x + {self.structure.hs[-1]} = 0"
            )
            out["g"] = self.structure.gamma_trace()
            out["t"] = _fmt(target(self.category, self.q))
        if self.notes:
            out["notes"] = list(self.notes)
        return out

    def lambdas(self, params=None, rng: random.Random | None = None) -> list:
        """A concrete list of H-block eigenvalues (exact when possible)."""
        hs = self.structure.hs
        if self.kind == "gamma":
            return []
        if self.kind == "explicit":
            if self.roots is not None:
                return [self.roots[0]]
            return [_numeric_root(self.quadratic, self.q)]
        rng = rng or random.Random(0)
        if params is None:
            params = [complex(rng.uniform(1.5, 3.0), rng.uniform(-1, 1)) for _ in range(len(hs) - 1)]
        qn = _numeric_q(self.q)
        t = complex(_numeric_value(target(self.category, self.q), qn))
        g = self.structure.gamma_trace()
        partial = g + sum(k * (mu + 1 / mu) for k, mu in zip(hs[:-1], params))
        kr = hs[-1]
        return list(params) + [_quad_root(kr, partial - t, kr)]

    def realize(self, params=None):
        """A matrix in this family (numeric if any lambda is irrational)."""
        lams = self.lambdas(params)
        blocks = [gamma_block(j) for j in self.structure.gammas]
        blocks += [h_block(k, lam) for k, lam in zip(self.structure.hs, lams)]
        M = direct_sum(*blocks)
        if any(isinstance(x, complex) for x in lams):
            qn = _numeric_q(self.q)
            M = [[_numeric_value(x, qn) for x in row] for row in M]
        return M


def _fmt(x) -> str:
    from .serialize import format_scalar

    return format_scalar(x)


def _numeric_value(x, qn: complex) -> complex:
    if isinstance(x, FieldElement):
        if x.is_constant():
            return complex(x.constant_value())
        return specialize(x, cmath.sqrt(qn))
    return complex(x)


def _quad_root(a, b, c) -> complex:
    d = cmath.sqrt(b * b - 4 * a * c)
    r1, r2 = (-b + d) / (2 * a), (-b - d) / (2 * a)
    return r1 if abs(r1) >= abs(r2) else r2


def _numeric_root(quad, q) -> complex:
    qn = _numeric_q(q)
    a, b, c = (_numeric_value(x, qn) for x in quad)
    return _quad_root(a, b, c)


def _exact_roots(a, b, c):
    disc = b * b - 4 * a * c
    root = disc.sqrt()
    if root is None:
        return None
    r1, r2 = (-b + root) / (2 * a), (-b - root) / (2 * a)
    return (r1, r2)


def _order_roots(roots, q):
    qn = _numeric_q(q)
    key = lambda r: abs(_numeric_value(r, qn))
    return tuple(sorted(roots, key=key, reverse=True))


def so3_dimensions_ok(n: int, steps: int = 64) -> bool:
    """Fiber dimensions of the simple objects X_k stay nonnegative.

    At generic q, X (x) X_k = X_(k-1) + X_k + X_(k+1), so a dimension-n fiber
    functor forces d_(k+1) = (n-1) d_k - d_(k-1) with d_0 = 1, d_1 = n.
    """
    d0, d1 = 1, n
    for _ in range(steps):
        if d1 < 0:
            return False
        d0, d1 = d1, (n - 1) * d1 - d0
    return d1 >= 0


def enumerate_solutions(category: str, n: int, q="generic") -> list[SolutionFamily]:
    """All congruence families of n x n solutions of the trace equation."""
    if category not in CATEGORIES:
        raise ValueError(f"unknown category {category!r}")
    if n < 1:
        return []
    q = parse_q(q)
    t = target(category, q)
    if category == "so3" and is_generic(q) and not so3_dimensions_ok(n):
        return []
    out = []
    for st in block_structures(n):
        g = _const(st.gamma_trace(), q)
        r = len(st.hs)
        if r == 0:
            if _is_zero(g - t):
                out.append(SolutionFamily(category, st, "gamma", q))
            continue
        if r >= 2:
            out.append(SolutionFamily(category, st, "parametric", q, free=r - 1))
            continue
        k = st.hs[0]
        a, b, c = _const(k, q), g - t, _const(k, q)
        bad = _const((-1) ** (k + 1), q)
        # roots multiply to 1, so an inadmissible root is a double root
        if _is_zero(a * bad * bad + b * bad + c):
            continue
        roots = None
        if is_exact(q):
            ex = _exact_roots(a, b, c)
            if ex is not None:
                roots = _order_roots(ex, q)
        else:
            d = cmath.sqrt(b * b - 4 * a * c)
            roots = _order_roots(((-b + d) / (2 * a), (-b - d) / (2 * a)), q)
        out.append(SolutionFamily(category, st, "explicit", q, quadratic=(a, b, c), roots=roots))
    return out


def special_q_values(category: str, n: int) -> list[tuple[BlockStructure, list[complex], tuple]]:
    """Values of q at which an all-Gamma structure solves the trace equation.

    Returns (structure, roots, integer polynomial coefficients in q, highest first).
    """
    out = []
    for st in block_structures(n):
        if st.hs:
            continue
        g = st.gamma_trace()
        if category == "sl2":  # -(q + 1/q) = g
            poly = (1, g, 1)
        elif category == "gl2":
            poly = (1, -g, 1)
        else:  # q^2 + 1 + q^-2 = g
            poly = (1, 0, 1 - g, 0, 1)
        roots = sorted(np.roots(poly).tolist(), key=lambda z: (round(z.real, 9), round(z.imag, 9)))
        out.append((st, roots, poly))
    return out


def n1_nonexistence(category: str, q="generic") -> bool:
    """True iff there is no fiber data of dimension 1 (and 2 for so3)."""
    dims = (1, 2) if category == "so3" else (1,)
    return all(not enumerate_solutions(category, n, q) for n in dims)


@dataclass
class Witness:
    matrix: list
    quadratic: tuple | None
    exact: bool

    def to_json(self) -> dict:
        out = {"matrix": [[_fmt(x) for x in row] for row in self.matrix], "exact": self.exact}
        if self.quadratic is not None:
            out["quadratic"] = [_fmt(c) for c in self.quadratic]
        return out


def existence_witness(category: str, n: int, q="generic") -> Witness:
    """An explicit invertible n x n matrix solving the trace equation.

    sl2/gl2: identity padding plus [[0, 1], [x, 0]] with x^2 + (n - 2 - t) x + 1 = 0.
    so3, n = 3: [[1, 0, 0], [0, 0, 1], [0, q^2, 0]].
    """
    q = parse_q(q)
    if category == "so3":
        if n < 3 or (is_generic(q) and not so3_dimensions_ok(n)):
            raise NoSolution(f"no so3 fiber data of dimension {n}")
        if n == 3:
            one, zero = _const(1, q), _const(0, q)
            M = [[one, zero, zero], [zero, zero, one], [zero, q * q, zero]]
            return Witness(M, None, is_exact(q))
    elif n < 2:
        raise NoSolution(f"no {category} witness of dimension {n} (use enumerate_solutions for special q)")
    t = target(category, q)
    a, b, c = _const(1, q), _const(n - 2, q) - t, _const(1, q)
    if is_exact(q):
        ex = _exact_roots(a, b, c)
        if ex is not None:
            x = _order_roots(ex, q)[0]
            return Witness(_padded(n, x, q), (a, b, c), True)
        x = _numeric_root((a, b, c), q)
        return Witness(_padded(n, x, complex(1)), (a, b, c), False)
    return Witness(_padded(n, _quad_root(a, b, c), q), (a, b, c), False)


def _padded(n: int, x, q):
    one, zero = _const(1, q), _const(0, q)
    M = [[one if i == j and i < n - 2 else zero for j in range(n)] for i in range(n)]
    M[n - 2][n - 1] = one
    M[n - 1][n - 2] = x
    return M


def witness_trace(w: Witness, q):
    """quantum_trace of a witness, numeric at q when the witness is numeric."""
    if w.exact:
        return quantum_trace(w.matrix)
    return quantum_trace([[complex(x) for x in row] for row in w.matrix])
