"""JSON encoding of scalars, linear maps, tensors, fiber specs and canonical forms."""
from __future__ import annotations

from fractions import Fraction

from .errors import TypeMismatch
from .linmap import LinearMap
from .qscalar import DEFAULT_EPS, FieldElement, QContext, parse_complex, parse_field

DIGITS = 12


def format_complex(z: complex, digits: int = DIGITS) -> str:
    """"a+bi" with a fixed number of significant digits; "-0" is folded to "0"."""
    re = float(f"{z.real:.{digits}g}") + 0.0
    im = float(f"{z.imag:.{digits}g}") + 0.0
    if im == 0:
        return f"{re:.{digits}g}"
    sign = "+" if im > 0 else "-"
    return f"{re:.{digits}g}{sign}{abs(im):.{digits}g}i"


def format_scalar(x) -> str:
    if isinstance(x, FieldElement):
        return str(x)
    if isinstance(x, (int, Fraction)):
        return str(x)
    return format_complex(complex(x))


def parse_scalar(text, ctx: QContext):
    """Read a scalar written as a Q(v) term list, a rational, or "a+bi"."""
    if isinstance(text, (int, Fraction)):
        return ctx.const(text)
    if isinstance(text, float):
        return ctx.const(Fraction(text)) if ctx.exact else complex(text)
    s = str(text).strip()
    if ctx.exact:
        try:
            return ctx.const(parse_field(s))
        except ValueError as exc:
            raise TypeMismatch(f"cannot read {s!r} as an exact scalar") from exc
    try:
        return ctx.const(parse_field(s))
    except ValueError:
        pass
    try:
        return parse_complex(s)
    except ValueError as exc:
        raise TypeMismatch(f"cannot read {s!r} as a number") from exc


# contexts -----------------------------------------------------------------------------


def context_to_json(ctx: QContext) -> dict:
    if ctx.symbolic:
        return {"mode": "exact", "q": "generic"}
    if ctx.exact:
        return {"mode": "exact", "q": str(ctx.q), "v": str(ctx.v)}
    return {"mode": "numeric", "q": format_complex(ctx.v * ctx.v), "v": format_complex(ctx.v, 17), "eps": ctx.eps}


def context_from_json(obj: dict, eps: float | None = None) -> QContext:
    mode = obj.get("mode", "exact")
    eps = obj.get("eps", DEFAULT_EPS) if eps is None else eps
    q = str(obj.get("q", "generic")).strip()
    if mode == "exact":
        if q == "generic" and "v" not in obj:
            return QContext.generic()
        if "v" in obj:
            v = parse_field(str(obj["v"]))
            if not v.is_constant():
                return QContext.generic()
            return QContext.exact_v(v.constant_value())
        qv = parse_field(q).constant_value()
        root = FieldElement.from_rational(qv).sqrt()
        if root is None:
            raise TypeMismatch(f"q={q} has no rational square root; use numeric mode")
        return QContext.exact_v(root.constant_value())
    if "v" in obj:
        return QContext("numeric", parse_complex(str(obj["v"])), eps)
    if q == "generic":
        raise TypeMismatch("numeric mode needs a value for q")
    return QContext.numeric_q(parse_complex(q), eps)


# linear maps and tensors ------------------------------------------------------------------


def linmap_to_json(A: LinearMap) -> dict:
    entries = [[i, j, format_scalar(x)] for (i, j), x in sorted(A.data.items())]
    return {"rows": A.rows, "cols": A.cols, "entries": entries}


def linmap_from_json(obj: dict, ctx: QContext) -> LinearMap:
    data = {(int(i), int(j)): parse_scalar(x, ctx) for i, j, x in obj.get("entries", [])}
    return LinearMap(int(obj["rows"]), int(obj["cols"]), data)


def tensor_to_json(T) -> dict:
    entries = [[i, j, k, format_scalar(x)] for (i, j, k), x in sorted(T.entries.items())]
    return {"dims": list(T.dims), "entries": entries}


def tensor_from_json(obj: dict, ctx: QContext):
    from .fiber import Tensor3

    dims = tuple(int(d) for d in obj["dims"])
    if len(dims) != 3:
        raise TypeMismatch("tensor dims must have length 3")
    ent = {(int(i), int(j), int(k)): parse_scalar(x, ctx) for i, j, k, x in obj.get("entries", [])}
    return Tensor3(dims, ent)


# fiber specs --------------------------------------------------------------------------


def spec_to_json(spec) -> dict:
    out = {"category": spec.category, "n": spec.n}
    out["M"] = [[format_scalar(x) for x in row] for row in spec.M]
    if spec.T is not None:
        out["T"] = tensor_to_json(spec.T)
    if spec.category == "gl2":
        out["P"] = spec.P
    if spec.tensor_scale_sq is not None:
        out["tensor_scale_sq"] = format_scalar(spec.tensor_scale_sq)
    out.update(context_to_json(spec.ctx))
    return out


def spec_from_json(obj: dict, ctx: QContext | None = None):
    from .fiber import FiberSpec

    try:
        if ctx is None:
            ctx = context_from_json(obj)
        M = [[parse_scalar(x, ctx) for x in row] for row in obj["M"]]
        n = int(obj.get("n", len(M)))
        T = tensor_from_json(obj["T"], ctx) if obj.get("T") is not None else None
        s2 = obj.get("tensor_scale_sq")
        return FiberSpec(
            obj["category"],
            n,
            M,
            ctx,
            T=T,
            P=int(obj.get("P", 1)),
            tensor_scale_sq=None if s2 is None else parse_scalar(s2, ctx),
        )
    except (KeyError, TypeError) as exc:
        raise TypeMismatch(f"malformed spec JSON: {exc}") from exc


# canonical forms --------------------------------------------------------------------------


def canonical_from_json(obj: dict, ctx: QContext | None = None):
    from .congruence import Block, CanonicalForm

    blocks = []
    for b in obj.get("blocks", []):
        kind = b["kind"]
        if kind == "Gamma":
            blocks.append(Block("Gamma", int(b["j"])))
        elif kind == "J0":
            blocks.append(Block("J0", int(b["i"])))
        elif kind == "H":
            lam = str(b["lambda"])
            try:
                val = parse_field(lam)
            except ValueError:
                val = parse_complex(lam)
            if ctx is not None and not ctx.exact and isinstance(val, FieldElement):
                val = ctx.const(val)
            blocks.append(Block("H", int(b["k"]), val))
        else:
            raise TypeMismatch(f"unknown block kind {kind!r}")
    mode = "exact" if all(not isinstance(b.lam, complex) for b in blocks) else "numeric"
    return CanonicalForm(tuple(blocks), mode)
