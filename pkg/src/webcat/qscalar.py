"""Exact arithmetic in Q(v), v = q^(1/2), plus numeric specialization.

Elements are stored as reduced fractions of Laurent polynomials in v with
rational coefficients.  q itself is ``v**2``.
"""
from __future__ import annotations

import cmath
import re
from fractions import Fraction
from typing import Iterable, Union

DEFAULT_EPS = 1e-9


class PoleError(ZeroDivisionError):
    """Denominator vanishes at the requested specialization point."""


class DivisionByZero(ZeroDivisionError):
    pass


Rational = Union[int, Fraction]


class LaurentPoly:
    """Sparse Laurent polynomial in v: exponent -> Fraction, no zero entries."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: dict[int, Rational] | None = None):
        clean: dict[int, Fraction] = {}
        if coeffs:
            for e, c in coeffs.items():
                if c != 0:
                    clean[int(e)] = Fraction(c)
        self.coeffs = clean
        self._hash = None

    @classmethod
    def const(cls, c: Rational) -> LaurentPoly:
        return cls({0: c})

    @classmethod
    def monomial(cls, e: int, c: Rational = 1) -> LaurentPoly:
        return cls({e: c})

    def is_zero(self) -> bool:
        return not self.coeffs

    def min_exp(self) -> int:
        return min(self.coeffs)

    def max_exp(self) -> int:
        return max(self.coeffs)

    def degree_span(self) -> int:
        return self.max_exp() - self.min_exp() if self.coeffs else -1

    def lead(self) -> Fraction:
        return self.coeffs[self.max_exp()]

    def shift(self, k: int) -> LaurentPoly:
        return LaurentPoly({e + k: c for e, c in self.coeffs.items()})

    def scale(self, c: Rational) -> LaurentPoly:
        return LaurentPoly({e: a * c for e, a in self.coeffs.items()})

    def __add__(self, other: LaurentPoly) -> LaurentPoly:
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out)

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other: LaurentPoly) -> LaurentPoly:
        return self + (-other)

    def __mul__(self, other: LaurentPoly) -> LaurentPoly:
        if not self.coeffs or not other.coeffs:
            return LaurentPoly()
        out: dict[int, Fraction] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(out)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LaurentPoly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.coeffs.items()))
        return self._hash

    def evaluate(self, v0: complex) -> complex:
        return sum(complex(c) * v0**e for e, c in self.coeffs.items())

    def evaluate_exact(self, v0: Fraction) -> Fraction:
        return sum((c * Fraction(v0) ** e for e, c in self.coeffs.items()), Fraction(0))

    # polynomial helpers (used on shifted copies with min exponent 0)
    def _divmod_poly(self, other: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
        rem = dict(self.coeffs)
        quot: dict[int, Fraction] = {}
        d = other.max_exp()
        lc = other.lead()
        while rem:
            top = max(rem)
            if top < d:
                break
            f = rem[top] / lc
            quot[top - d] = f
            for e, c in other.coeffs.items():
                k = e + top - d
                val = rem.get(k, 0) - f * c
                if val == 0:
                    rem.pop(k, None)
                else:
                    rem[k] = val
        return LaurentPoly(quot), LaurentPoly(rem)

    def __repr__(self) -> str:
        return f"LaurentPoly({format_laurent(self)})"


def _normalize_poly(p: LaurentPoly) -> LaurentPoly:
    return p.shift(-p.min_exp()) if p.coeffs else p


def poly_gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Monic gcd of two Laurent polynomials viewed as polynomials (min exp 0)."""
    a, b = _normalize_poly(a), _normalize_poly(b)
    while not b.is_zero():
        _, r = a._divmod_poly(b)
        a, b = b, _normalize_poly(r)
    if a.is_zero():
        return a
    return a.scale(1 / a.lead())


class FieldElement:
    """Element of Q(v) in canonical form num/den.

    The denominator is monic with lowest exponent 0 and shares no common
    factor with the numerator.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: LaurentPoly, den: LaurentPoly | None = None, *, _canonical: bool = False):
        if den is None:
            den = LaurentPoly.const(1)
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if not _canonical:
            num, den = _canonicalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    # constructors
    @classmethod
    def from_rational(cls, c: Rational) -> FieldElement:
        return cls(LaurentPoly.const(c), _one_poly(), _canonical=True)

    @classmethod
    def v(cls) -> FieldElement:
        return cls(LaurentPoly.monomial(1), _one_poly(), _canonical=True)

    @classmethod
    def q(cls) -> FieldElement:
        return cls(LaurentPoly.monomial(2), _one_poly(), _canonical=True)

    @classmethod
    def zero(cls) -> FieldElement:
        return cls(LaurentPoly(), _one_poly(), _canonical=True)

    @classmethod
    def one(cls) -> FieldElement:
        return cls.from_rational(1)

    @classmethod
    def coerce(cls, x) -> FieldElement:
        if isinstance(x, FieldElement):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.from_rational(x)
        if isinstance(x, LaurentPoly):
            return cls(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to FieldElement")

    # predicates
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.coeffs == {0: Fraction(1)}

    def is_constant(self) -> bool:
        return self.is_polynomial() and set(self.num.coeffs) <= {0}

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num.coeffs.get(0, Fraction(0))

    # arithmetic
    def __add__(self, other) -> FieldElement:
        try:
            o = FieldElement.coerce(other)
        except TypeError:
            return NotImplemented
        if self.is_polynomial() and o.is_polynomial():
            return FieldElement(self.num + o.num, _one_poly(), _canonical=True)
        if self.den == o.den:
            return FieldElement(self.num + o.num, self.den)
        return FieldElement(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> FieldElement:
        return FieldElement(-self.num, self.den, _canonical=True)

    def __sub__(self, other) -> FieldElement:
        try:
            o = FieldElement.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> FieldElement:
        return FieldElement.coerce(other) - self

    def __mul__(self, other) -> FieldElement:
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return FieldElement.zero()
            return FieldElement(self.num.scale(other), self.den, _canonical=True)
        try:
            o = FieldElement.coerce(other)
        except TypeError:
            return NotImplemented
        if self.is_polynomial() and o.is_polynomial():
            return FieldElement(self.num * o.num, _one_poly(), _canonical=True)
        return FieldElement(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> FieldElement:
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        return FieldElement(self.den, self.num)

    def __truediv__(self, other) -> FieldElement:
        o = FieldElement.coerce(other)
        return self * o.inverse()

    def __rtruediv__(self, other) -> FieldElement:
        return FieldElement.coerce(other) * self.inverse()

    def __pow__(self, k: int) -> FieldElement:
        if k < 0:
            return self.inverse() ** (-k)
        out = FieldElement.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        try:
            o = FieldElement.coerce(other)
        except TypeError:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def bar(self) -> FieldElement:
        """Substitute v -> v^-1."""
        flip = lambda p: LaurentPoly({-e: c for e, c in p.coeffs.items()})
        return FieldElement(flip(self.num), flip(self.den))

    def specialize(self, v0: complex, eps: float = DEFAULT_EPS) -> complex:
        return specialize(self, v0, eps)

    def sqrt(self) -> FieldElement | None:
        """Exact square root in Q(v) when one exists, else None."""
        if self.is_zero():
            return self
        rn = _poly_sqrt(self.num)
        rd = _poly_sqrt(self.den)
        if rn is None or rd is None:
            return None
        return FieldElement(rn, rd)

    def to_json(self) -> dict:
        enc = lambda p: [[e, str(c)] for e, c in sorted(p.coeffs.items())]
        return {"num": enc(self.num), "den": enc(self.den)}

    @classmethod
    def from_json(cls, obj: dict) -> FieldElement:
        dec = lambda terms: LaurentPoly({int(e): Fraction(c) for e, c in terms})
        return cls(dec(obj["num"]), dec(obj.get("den", [[0, "1"]])))

    def __str__(self) -> str:
        if self.is_polynomial():
            return format_laurent(self.num)
        return f"({format_laurent(self.num)})/({format_laurent(self.den)})"

    def __repr__(self) -> str:
        return f"FieldElement({self})"


def _one_poly() -> LaurentPoly:
    return LaurentPoly.const(1)


def _exact_div(p: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    m = p.min_exp()
    quot, rem = p.shift(-m)._divmod_poly(g)
    assert rem.is_zero()
    return quot.shift(m)


def _canonicalize(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    if num.is_zero():
        return num, _one_poly()
    # fold the monomial part of den into num so den has lowest exponent 0
    shift = den.min_exp()
    den = den.shift(-shift)
    num = num.shift(-shift)
    if den.degree_span() > 0:
        g = poly_gcd(num, den)
        if g.degree_span() > 0:
            num = _exact_div(num, g)
            den = _exact_div(den, g)
    lc = den.lead()
    if lc != 1:
        num = num.scale(1 / lc)
        den = den.scale(1 / lc)
    return num, den


def _rational_sqrt(c: Fraction) -> Fraction | None:
    if c < 0:
        return None
    from math import isqrt
    a, b = isqrt(c.numerator), isqrt(c.denominator)
    if a * a == c.numerator and b * b == c.denominator:
        return Fraction(a, b)
    return None


def _poly_sqrt(p: LaurentPoly) -> LaurentPoly | None:
    """Square root of a Laurent polynomial with positive leading coefficient."""
    lo, hi = p.min_exp(), p.max_exp()
    if lo % 2 or hi % 2:
        return None
    lead = _rational_sqrt(p.lead())
    if lead is None:
        return None
    # top-down long square root
    root: dict[int, Fraction] = {hi // 2: lead}
    for k in range(hi // 2 - 1, lo // 2 - 1, -1):
        r = LaurentPoly(root)
        rem = (p - r * r).coeffs.get(k + hi // 2, Fraction(0))
        root[k] = rem / (2 * lead)
    r = LaurentPoly(root)
    return r if r * r == p else None


def format_laurent(p: LaurentPoly) -> str:
    """Terms ordered by |exponent|, positive first: "-1 - v^4 - v^-4"."""
    if p.is_zero():
        return "0"
    parts = []
    for e in sorted(p.coeffs, key=lambda e: (abs(e), -e)):
        c = p.coeffs[e]
        sign = "-" if c < 0 else "+"
        a = abs(c)
        mono = "" if e == 0 else ("v" if e == 1 else f"v^{e}")
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        parts.append((sign, body))
    head_sign, head = parts[0]
    out = ("-" if head_sign == "-" else "") + head
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


_TERM = re.compile(r"^(?:(\d+(?:/\d+)?)\s*\*?\s*)?(v(?:\^(-?\d+))?)?$")


def parse_laurent(text: str) -> LaurentPoly:
    s = text.replace(" ", "").replace("**", "^")
    if not s:
        raise ValueError("empty polynomial")
    # split on + and - that are not part of an exponent
    tokens = re.findall(r"[+-]?[^+-]+(?:\^-\d+[^+-]*)?", s.replace("^-", "^~"))
    out: dict[int, Fraction] = {}
    for tok in tokens:
        tok = tok.replace("^~", "^-")
        sign = -1 if tok.startswith("-") else 1
        tok = tok.lstrip("+-")
        m = _TERM.match(tok)
        if not m or (m.group(1) is None and m.group(2) is None):
            raise ValueError(f"cannot parse term {tok!r}")
        c = Fraction(m.group(1)) if m.group(1) else Fraction(1)
        if m.group(2):
            e = int(m.group(3)) if m.group(3) else 1
        else:
            e = 0
        out[e] = out.get(e, 0) + sign * c
    return LaurentPoly(out)


def parse_field(text: str) -> FieldElement:
    """Parse "num" or "(num)/(den)" in the textual term format."""
    s = text.strip()
    m = re.fullmatch(r"\((.*)\)\s*/\s*\((.*)\)", s)
    if m:
        return FieldElement(parse_laurent(m.group(1)), parse_laurent(m.group(2)))
    return FieldElement(parse_laurent(s))


def quantum_integer(k: int) -> FieldElement:
    """[k] = (q^k - q^-k)/(q - q^-1) = sum of q^(k-1-2i), as a polynomial in v."""
    if k == 0:
        return FieldElement.zero()
    sign = 1 if k > 0 else -1
    k = abs(k)
    return FieldElement(LaurentPoly({2 * (k - 1 - 2 * i): sign for i in range(k)}))


def specialize(x: FieldElement, v0: complex, eps: float = DEFAULT_EPS) -> complex:
    d = x.den.evaluate(v0)
    if abs(d) < eps:
        raise PoleError(f"denominator vanishes at v={v0}")
    return x.num.evaluate(v0) / d


def specialize_exact(x: FieldElement, v0: Rational) -> Fraction:
    d = x.den.evaluate_exact(Fraction(v0))
    if d == 0:
        raise PoleError(f"denominator vanishes at v={v0}")
    return x.num.evaluate_exact(Fraction(v0)) / d


def parse_complex(text: str) -> complex:
    """Parse "a+bi" style strings (also accepts j)."""
    return complex(text.replace(" ", "").replace("i", "j"))


class QContext:
    """Where scalars live: symbolic Q(v), Q(v) at a rational v, or complex numbers.

    ``v`` is the element standing in for q^(1/2).  Formulas written against a
    context work unchanged in all three settings.
    """

    def __init__(self, mode: str = "exact", v=None, eps: float = DEFAULT_EPS):
        if mode not in ("exact", "numeric"):
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self.eps = eps
        if mode == "exact":
            self.v = FieldElement.v() if v is None else FieldElement.coerce(v)
        else:
            if v is None:
                raise ValueError("numeric mode needs a value for v")
            self.v = complex(v)

    @classmethod
    def generic(cls) -> QContext:
        return cls("exact")

    @classmethod
    def numeric_q(cls, q: complex, eps: float = DEFAULT_EPS) -> QContext:
        return cls("numeric", cmath.sqrt(complex(q)), eps)

    @classmethod
    def exact_v(cls, v0: Rational) -> QContext:
        return cls("exact", FieldElement.from_rational(v0))

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    @property
    def symbolic(self) -> bool:
        return self.exact and not self.v.is_constant()

    def one(self):
        return FieldElement.one() if self.exact else 1 + 0j

    def zero(self):
        return FieldElement.zero() if self.exact else 0j

    def const(self, c):
        """Bring a rational, complex or symbolic FieldElement into this context."""
        if isinstance(c, FieldElement):
            if self.exact:
                if self.symbolic:
                    return c
                return FieldElement.from_rational(specialize_exact(c, self.v.constant_value()))
            return specialize(c, self.v, self.eps)
        if self.exact:
            if isinstance(c, complex):
                raise TypeError("complex constant in exact mode")
            return FieldElement.coerce(Fraction(c))
        return complex(c)

    @property
    def q(self):
        return self.v * self.v

    def qint(self, k: int):
        return self.const(quantum_integer(k)) if not self.symbolic else quantum_integer(k)

    def is_zero(self, x) -> bool:
        if self.exact:
            return FieldElement.coerce(x).is_zero()
        return abs(x) < self.eps

    def inv(self, x):
        if self.is_zero(x):
            raise DivisionByZero("division by zero")
        return 1 / x

    def sqrt(self, x):
        """Square root inside the context, None when not available exactly."""
        if self.exact:
            return FieldElement.coerce(x).sqrt()
        return cmath.sqrt(x)

    def to_complex(self, x, v0: complex | None = None) -> complex:
        if self.exact:
            x = FieldElement.coerce(x)
            if self.symbolic:
                return specialize(x, v0 if v0 is not None else SAMPLE_V, self.eps)
            return complex(x.constant_value())
        return complex(x)

    def describe(self) -> str:
        if self.mode == "numeric":
            return f"numeric(v={self.v})"
        return "generic" if self.symbolic else f"exact(v={self.v})"


# fixed generic-looking point used to report sizes of symbolic residuals
SAMPLE_V = complex(1.1, 0.37)


def field_sum(items: Iterable, start=None):
    acc = start
    for x in items:
        acc = x if acc is None else acc + x
    return acc
