"""Fiber functors on web categories: generator images, evaluation, relations.

A :class:`FiberSpec` holds the linear data (n, M[, P], T) together with the
:class:`~webcat.qscalar.QContext` its entries live in.  Diagrams are evaluated
column by column on sparse vectors indexed by tuples of basis indices.

For so3 the trivalent vertex usually carries a factor 1/s with s**2 a
non-square of Q(v).  Such specs store ``s*T`` and ``tensor_scale_sq = s**2``;
evaluation folds pairs of vertices into powers of s**2 and reports whether an
odd factor 1/s is left over.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import webdiag as wd
from .errors import DimensionCap, SingularMatrix, TraceConditionFailed, TypeMismatch, UndefinedAtQ, UnsupportedExact
from .linmap import LinearMap, mat_inverse, mat_rank, mat_transpose, mat_mul
from .qscalar import FieldElement, QContext

DEFAULT_CAP = 10**6


@dataclass(frozen=True)
class Tensor3:
    dims: tuple[int, int, int]
    entries: dict

    def get(self, i, j, k, zero=0):
        return self.entries.get((i, j, k), zero)

    @classmethod
    def from_dense(cls, arr) -> Tensor3:
        a, b, c = len(arr), len(arr[0]), len(arr[0][0])
        ent = {}
        for i in range(a):
            for j in range(b):
                for k in range(c):
                    x = arr[i][j][k]
                    if x != 0 and not (isinstance(x, FieldElement) and x.is_zero()):
                        ent[(i, j, k)] = x
        return cls((a, b, c), ent)

    def to_dense(self, zero=0):
        a, b, c = self.dims
        out = [[[zero] * c for _ in range(b)] for _ in range(a)]
        for (i, j, k), x in self.entries.items():
            out[i][j][k] = x
        return out


class FiberSpec:
    """Linear data of a rank-one fiber functor."""

    def __init__(
        self,
        category: str,
        n: int,
        M,
        ctx: QContext | None = None,
        T: Tensor3 | None = None,
        P: int = 1,
        tensor_scale_sq=None,
    ):
        if category not in wd.CATEGORIES:
            raise TypeMismatch(f"unknown category {category!r}")
        self.category = category
        self.n = n
        self.ctx = ctx or QContext.generic()
        self.M = [[self._coerce(x) for x in row] for row in M]
        if len(self.M) != n or any(len(r) != n for r in self.M):
            raise TypeMismatch(f"M must be {n}x{n}")
        self.N = mat_inverse(self.M, self.ctx)
        if P not in (1, -1):
            raise TypeMismatch("P must be +1 or -1")
        self.P = P
        if category == "so3" and T is not None and T.dims != (n, n, n):
            raise TypeMismatch(f"so3 tensor must be {n}x{n}x{n}")
        if category == "gl2" and T is not None and T.dims != (n, 1, n):
            raise TypeMismatch(f"gl2 tensor must be {n}x1x{n}")
        self.T = None if T is None else Tensor3(T.dims, {k: self._coerce(x) for k, x in T.entries.items()})
        self.tensor_scale_sq = None if tensor_scale_sq is None else self._coerce(tensor_scale_sq)
        self.cap = DEFAULT_CAP
        self._images: dict[str, LinearMap] = {}
        self._local: dict[str, dict] = {}
        self._tdown = None

    def _coerce(self, x):
        if self.ctx.exact:
            return self.ctx.const(x) if not isinstance(x, FieldElement) else self.ctx.const(x)
        return complex(self.ctx.const(x)) if isinstance(x, FieldElement) else complex(x)

    # shapes
    def strand_dim(self, label: str) -> int:
        return 1 if label in ("p", "q") else self.n

    def word_dims(self, word) -> list[int]:
        return [self.strand_dim(a) for a in word]

    def word_dim(self, word) -> int:
        d = 1
        for a in word:
            d *= self.strand_dim(a)
        return d

    @property
    def scaled(self) -> bool:
        return self.tensor_scale_sq is not None

    def tdown_tensor(self) -> Tensor3:
        """Partner of T for the coform vertex."""
        if self._tdown is None:
            self._tdown = _tdown_tensor(self)
        return self._tdown

    def to_json(self) -> dict:
        from .serialize import spec_to_json

        return spec_to_json(self)


def _tdown_tensor(spec: FiberSpec) -> Tensor3:
    ctx, n = spec.ctx, spec.n
    if spec.T is None:
        raise TypeMismatch(f"{spec.category} spec has no trilinear form")
    T, N = spec.T, spec.N
    if spec.category == "so3":
        # rotate T by three nested cups: D[a,b,c] = sum N[a,f] N[b,e] N[c,d] T[d,e,f]
        ent = {}
        for (d, e, f), t in T.entries.items():
            for a in range(n):
                if _zero(N[a][f]):
                    continue
                for b in range(n):
                    if _zero(N[b][e]):
                        continue
                    x = N[a][f] * N[b][e] * t
                    for c in range(n):
                        if _zero(N[c][d]):
                            continue
                        key = (a, b, c)
                        val = x * N[c][d]
                        ent[key] = ent[key] + val if key in ent else val
        return Tensor3((n, n, n), {k: v for k, v in ent.items() if not _zero(v)})
    # gl2: D = T^{-T} M^T N, the unique partner with T^l T_l = id
    Tm = [[T.get(i, 0, k, ctx.zero()) for k in range(n)] for i in range(n)]
    try:
        Tinv = mat_inverse(Tm, ctx)
    except SingularMatrix as exc:
        raise SingularMatrix("gl2 trilinear form is degenerate") from exc
    D = mat_mul(mat_mul(mat_transpose(Tinv), mat_transpose(spec.M), ctx), N, ctx)
    return Tensor3((n, 1, n), {(i, 0, k): D[i][k] for i in range(n) for k in range(n) if not _zero(D[i][k])})


def _zero(x) -> bool:
    if isinstance(x, FieldElement):
        return x.is_zero()
    return x == 0


# generator images ---------------------------------------------------------------


def _tuples(dims):
    return list(itertools.product(*[range(d) for d in dims]))


def _index(t, dims) -> int:
    i = 0
    for a, d in zip(t, dims):
        i = i * d + a
    return i


def _planar_image(spec: FiberSpec, g: str) -> LinearMap:
    ctx, n, cat = spec.ctx, spec.n, spec.category
    dom, cod = wd.GENERATORS[cat][g]
    rows, cols = spec.word_dim(cod), spec.word_dim(dom)
    data = {}
    if g in ("cap", "cap'"):
        for i in range(n):
            for j in range(n):
                data[(0, i * n + j)] = spec.M[i][j]
    elif g in ("cup", "cup'"):
        for i in range(n):
            for j in range(n):
                data[(i * n + j, 0)] = spec.N[i][j]
    elif g in ("pcap", "pcup", "pcap'", "pcup'"):
        data[(0, 0)] = ctx.const(spec.P)
    elif g == "tup":
        T = spec.T
        if T is None:
            raise TypeMismatch(f"{cat} spec has no trilinear form")
        dims = spec.word_dims(dom)
        for key, x in T.entries.items():
            data[(0, _index(key, dims))] = x
    elif g == "tdown":
        D = spec.tdown_tensor()
        dims = spec.word_dims(cod)
        for key, x in D.entries.items():
            data[(_index(key, dims), 0)] = x
    else:  # pragma: no cover
        raise TypeMismatch(f"{g} is not planar")
    return LinearMap(rows, cols, data)


def _so3_h_diagram() -> wd.LayeredDiagram:
    # (id x T_l) o (T^l x id) on two strands
    return wd.LayeredDiagram("so3", ("x", "x"), ((0, "tdown"), (2, "cap"), (3, "cup"), (1, "tup")))


def _so3_i_diagram() -> wd.LayeredDiagram:
    # T^l o T_l on two strands
    return wd.LayeredDiagram("so3", ("x", "x"), ((2, "cup"), (0, "tup"), (0, "tdown"), (2, "cap")))


def _turnback(category: str) -> wd.LayeredDiagram:
    return wd.LayeredDiagram(category, ("x", "x"), ((0, "cap"), (0, "cup")))


def _gl2_split_merge() -> wd.LayeredDiagram:
    layers = wd.gl2_move_layers("merge", 0) + wd.gl2_move_layers("split", 0)
    return wd.LayeredDiagram("gl2", ("x", "x"), tuple(layers))


def _crossing_image(spec: FiberSpec, g: str) -> LinearMap:
    ctx, n, cat = spec.ctx, spec.n, spec.category
    v = ctx.v
    q = ctx.q
    ident = LinearMap.identity(n * n, ctx.one())
    if cat == "sl2":
        E = evaluate(spec, _turnback("sl2"))
        if g == "cross_pos":
            return ident.scale(v) + E.scale(1 / v)
        return ident.scale(1 / v) + E.scale(v)
    if cat == "so3":
        c = q * q + 1 / (q * q)
        if ctx.is_zero(c):
            raise UndefinedAtQ("so3 crossing needs q^2 + q^-2 != 0")
        E = evaluate(spec, _turnback("so3"))
        H = evaluate(spec, _so3_h_diagram())
        if g == "cross_pos":
            return ident.scale(q * q - 1) + E.scale(1 / (q * q)) + H.scale(c)
        return ident.scale(1 / (q * q) - 1) + E.scale(q * q) + H.scale(c)
    # gl2
    if g == "mixed_cross":
        layers = wd.gl2_move_layers("swap_xp", 0)
        return evaluate(spec, wd.LayeredDiagram("gl2", ("x", "p"), tuple(layers)))
    # the phantom bubble merge o split is +[2] here, so the turnback term needs
    # a minus sign for the two crossings to be mutually inverse
    E = evaluate(spec, _gl2_split_merge())
    if g == "cross_pos":
        return ident.scale(v) - E.scale(1 / v)
    return ident.scale(1 / v) - E.scale(v)


def generator_image(spec: FiberSpec, g: str) -> LinearMap:
    if g not in wd.GENERATORS[spec.category]:
        raise TypeMismatch(f"unknown generator {g!r} for {spec.category}")
    if g not in spec._images:
        if g in wd.CROSSINGS:
            spec._images[g] = _crossing_image(spec, g)
        else:
            spec._images[g] = _planar_image(spec, g)
    return spec._images[g]


def _local_table(spec: FiberSpec, g: str) -> dict:
    """generator image as {input tuple: [(output tuple, coeff), ...]}."""
    if g not in spec._local:
        dom, cod = wd.GENERATORS[spec.category][g]
        img = generator_image(spec, g)
        din, dout = spec.word_dims(dom), spec.word_dims(cod)
        tin, tout = _tuples(din), _tuples(dout)
        table: dict = {}
        for (r, c), x in img.data.items():
            table.setdefault(tin[c], []).append((tout[r], x))
        spec._local[g] = table
    return spec._local[g]


# evaluation -------------------------------------------------------------------


@dataclass
class Evaluation:
    """Raw evaluation: the true map is ``matrix * s**(-odd)`` for scaled specs."""

    matrix: LinearMap
    vertices: int
    odd: bool


def evaluate_raw(spec: FiberSpec, d: wd.LayeredDiagram) -> Evaluation:
    if d.category != spec.category:
        raise TypeMismatch(f"diagram is {d.category}, spec is {spec.category}")
    words = d.words()
    if d.codomain is not None:
        d.validate()
    ncols = spec.word_dim(words[0])
    biggest = max(spec.word_dim(w) for w in words)
    if ncols * biggest > spec.cap:
        raise DimensionCap(f"evaluation needs {ncols * biggest} entries, cap is {spec.cap}")
    columns = _tuples(spec.word_dims(words[0]))
    one = spec.ctx.one()
    state = [{t: one} for t in columns]
    for off, g in d.layers:
        k = len(wd.GENERATORS[spec.category][g][0])
        table = _local_table(spec, g)
        new_state = []
        for vec in state:
            acc: dict = {}
            for word, c in vec.items():
                mid = word[off : off + k]
                hits = table.get(mid)
                if not hits:
                    continue
                left, right = word[:off], word[off + k :]
                for out, x in hits:
                    key = left + out + right
                    val = c * x
                    acc[key] = acc[key] + val if key in acc else val
            new_state.append({w: c for w, c in acc.items() if not _zero(c)})
        state = new_state
    out_dims = spec.word_dims(words[-1])
    data = {}
    for j, vec in enumerate(state):
        for word, c in vec.items():
            data[(_index(word, out_dims), j)] = c
    mat = LinearMap(spec.word_dim(words[-1]), ncols, data)
    nv = d.vertex_count()
    odd = False
    if spec.scaled:
        half, odd = divmod(nv, 2)
        if half:
            mat = mat.scale(1 / (spec.tensor_scale_sq**half))
        odd = bool(odd)
    return Evaluation(mat, nv, odd)


def evaluate(spec: FiberSpec, d: wd.LayeredDiagram) -> LinearMap:
    """Image of a diagram.  Raises UnsupportedExact if the result carries an
    irrational factor 1/s that cannot be expressed in the exact field."""
    ev = evaluate_raw(spec, d)
    if not ev.odd or ev.matrix.is_zero(0.0):
        return ev.matrix
    s = spec.ctx.sqrt(spec.tensor_scale_sq)
    if s is None:
        raise UnsupportedExact("result carries a factor 1/s outside the exact field; use evaluate_raw")
    return ev.matrix.scale(1 / s)


# relations -----------------------------------------------------------------------


@dataclass
class RelationResult:
    name: str
    passed: bool
    max_abs_residual: float

    def to_json(self) -> dict:
        return {"name": self.name, "pass": self.passed, "max_abs_residual": self.max_abs_residual}


def _compare(spec: FiberSpec, name: str, lhs, rhs) -> RelationResult:
    """lhs/rhs are diagrams or (LinearMap, odd) pairs."""

    def norm(side):
        if isinstance(side, wd.LayeredDiagram):
            ev = evaluate_raw(spec, side)
            return ev.matrix, ev.odd
        return side

    (a, oa), (b, ob) = norm(lhs), norm(rhs)
    if a.shape != b.shape:
        return RelationResult(name, False, float("inf"))
    if oa != ob and not (a.is_zero(0.0) or b.is_zero(0.0)):
        return RelationResult(name, False, float("inf"))
    diff = a - b
    if spec.ctx.exact:
        ok = diff.is_zero(0.0)
        res = 0.0 if ok else diff.max_abs()
    else:
        res = diff.max_abs()
        ok = res < spec.ctx.eps * max(1.0, a.max_abs(), b.max_abs())
    return RelationResult(name, bool(ok), float(res))


def _scalar_map(x) -> tuple[LinearMap, bool]:
    return LinearMap(1, 1, {(0, 0): x}), False


def _ident(spec, word) -> tuple[LinearMap, bool]:
    return LinearMap.identity(spec.word_dim(word), spec.ctx.one()), False


def _D(cat, dom, layers):
    return wd.LayeredDiagram(cat, tuple(dom), tuple(layers))


def relation_checks(spec: FiberSpec) -> list[tuple[str, object, object]]:
    ctx, cat = spec.ctx, spec.category
    q = ctx.q
    out = []
    if cat in ("sl2", "so3"):
        out.append(("zigzag_left", _D(cat, "x", [(1, "cup"), (0, "cap")]), _ident(spec, "x")))
        out.append(("zigzag_right", _D(cat, "x", [(0, "cup"), (1, "cap")]), _ident(spec, "x")))
        target = -ctx.qint(2) if cat == "sl2" else ctx.qint(3)
        out.append(("circle", wd.circle(cat), _scalar_map(target)))
    if cat == "so3" and spec.T is not None:
        zero_fun = (LinearMap(1, spec.n), False)
        zero_vec = (LinearMap(spec.n, 1), False)
        out.append(("monogon_tup_left", _D(cat, "x", [(0, "cup"), (0, "tup")]), zero_fun))
        out.append(("monogon_tup_right", _D(cat, "x", [(1, "cup"), (0, "tup")]), zero_fun))
        out.append(("monogon_tdown_left", _D(cat, "", [(0, "tdown"), (0, "cap")]), zero_vec))
        out.append(("monogon_tdown_right", _D(cat, "", [(0, "tdown"), (1, "cap")]), zero_vec))
        out.append(("vertex_rotation", _D(cat, "xxx", [(0, "cup"), (1, "tup"), (0, "cap")]), _D(cat, "xxx", [(0, "tup")])))
        c = q * q + 1 / (q * q)
        if ctx.is_zero(c):
            raise UndefinedAtQ("H=I needs q^2 + q^-2 != 0")
        E = evaluate(spec, _turnback("so3"))
        I_raw = evaluate_raw(spec, _so3_i_diagram())
        ident = LinearMap.identity(spec.n**2, ctx.one())
        rhs = I_raw.matrix + (ident - E).scale(1 / c)
        out.append(("H=I", _so3_h_diagram(), (rhs, I_raw.odd)))
    if cat == "gl2":
        out += [
            ("zigzag_x_left", _D(cat, "x", [(1, "cup"), (0, "cap")]), _ident(spec, "x")),
            ("zigzag_x_right", _D(cat, "x", [(0, "cup'"), (1, "cap'")]), _ident(spec, "x")),
            ("zigzag_y_left", _D(cat, "y", [(1, "cup'"), (0, "cap'")]), _ident(spec, "y")),
            ("zigzag_y_right", _D(cat, "y", [(0, "cup"), (1, "cap")]), _ident(spec, "y")),
            ("zigzag_p_left", _D(cat, "p", [(1, "pcup"), (0, "pcap")]), _ident(spec, "p")),
            ("zigzag_p_right", _D(cat, "p", [(0, "pcup'"), (1, "pcap'")]), _ident(spec, "p")),
            ("zigzag_q_left", _D(cat, "q", [(1, "pcup'"), (0, "pcap'")]), _ident(spec, "q")),
            ("zigzag_q_right", _D(cat, "q", [(0, "pcup"), (1, "pcap")]), _ident(spec, "q")),
            ("circle", _D(cat, "", [(0, "cup'"), (0, "cap")]), _scalar_map(ctx.qint(2))),
            ("circle_reversed", _D(cat, "", [(0, "cup"), (0, "cap'")]), _scalar_map(ctx.qint(2))),
            ("phantom_circle", _D(cat, "", [(0, "pcup'"), (0, "pcap")]), _scalar_map(ctx.one())),
            ("phantom_circle_reversed", _D(cat, "", [(0, "pcup"), (0, "pcap'")]), _scalar_map(ctx.one())),
            ("vertical=horizontal_pq", _D(cat, "pq", [(0, "pcap"), (0, "pcup'")]), _ident(spec, "pq")),
            ("vertical=horizontal_qp", _D(cat, "qp", [(0, "pcap'"), (0, "pcup")]), _ident(spec, "qp")),
        ]
        if spec.T is not None:
            out += [
                ("trilinear_evaluation", _D(cat, "", [(0, "tdown"), (0, "tup")]), _scalar_map(ctx.qint(2))),
                ("H=I", _D(cat, "xq", [(2, "cup'"), (0, "tup"), (0, "tdown"), (2, "cap")]), _ident(spec, "xq")),
                ("H=I_mirror", _D(cat, "qx", [(0, "cup"), (1, "tup"), (1, "tdown"), (0, "cap'")]), _ident(spec, "qx")),
                ("T_snake", _D(cat, "y", [(0, "tdown"), (2, "cap"), (2, "cup'"), (0, "tup")]), _ident(spec, "y")),
                ("T_snake_mirror", _D(cat, "y", [(1, "tdown"), (0, "cap'"), (0, "cup"), (1, "tup")]), _ident(spec, "y")),
            ]
    return out


def check_all_relations(spec: FiberSpec) -> list[RelationResult]:
    return [_compare(spec, name, lhs, rhs) for name, lhs, rhs in relation_checks(spec)]


def all_pass(report: list[RelationResult]) -> bool:
    return all(r.passed for r in report)


def quantum_trace_of(spec: FiberSpec):
    acc = spec.ctx.zero()
    for i in range(spec.n):
        for j in range(spec.n):
            if not _zero(spec.M[i][j]) and not _zero(spec.N[i][j]):
                acc = acc + spec.M[i][j] * spec.N[i][j]
    return acc


def trace_target(category: str, ctx: QContext):
    return {"sl2": -ctx.qint(2), "gl2": ctx.qint(2), "so3": ctx.qint(3)}[category]


def check_trace_condition(spec: FiberSpec) -> tuple[bool, dict]:
    tr = quantum_trace_of(spec)
    target = trace_target(spec.category, spec.ctx)
    diff = tr - target
    ok = spec.ctx.is_zero(diff)
    return ok, {"trace": tr, "target": target, "pass": ok}


def bent_maps(spec: FiberSpec) -> tuple[LinearMap, LinearMap]:
    """(T_l, T^l).  For scaled so3 specs both carry the stored factor s."""
    if spec.category == "so3":
        tl = _D("so3", "xx", [(2, "cup"), (0, "tup")])
        tu = _D("so3", "x", [(0, "tdown"), (2, "cap")])
    elif spec.category == "gl2":
        tl = _D("gl2", "xq", [(2, "cup'"), (0, "tup")])
        tu = _D("gl2", "y", [(0, "tdown"), (2, "cap")])
    else:
        raise TypeMismatch("bent maps need a trilinear form")
    if spec.T is None:
        raise TypeMismatch("spec has no trilinear form")
    if all(_zero(x) for x in spec.T.entries.values()):
        # zero tensor: skip the partner construction, which may not exist
        return LinearMap(spec.word_dim(tl.target), spec.word_dim(tl.domain)), LinearMap(
            spec.word_dim(tu.target), spec.word_dim(tu.domain)
        )
    return evaluate_raw(spec, tl).matrix, evaluate_raw(spec, tu).matrix


# braiding ------------------------------------------------------------------------


def crossing_matrix(spec: FiberSpec, negative: bool = False) -> LinearMap:
    if spec.category not in ("sl2", "so3"):
        raise TypeMismatch("crossing_matrix is for sl2/so3")
    return generator_image(spec, "cross_neg" if negative else "cross_pos")


def flip_matrix(n: int, one=1) -> LinearMap:
    return LinearMap(n * n, n * n, {(j * n + i, i * n + j): one for i in range(n) for j in range(n)})


def flip_test(spec: FiberSpec) -> bool:
    C = crossing_matrix(spec)
    F = flip_matrix(spec.n, spec.ctx.one())
    if spec.ctx.exact:
        return C == F
    return C.equals(F, spec.ctx.eps)


# faithfulness ------------------------------------------------------------------------


def basis_images(spec: FiberSpec, k: int, l: int) -> list[LinearMap]:
    return [evaluate_raw(spec, d).matrix for d in wd.basis(spec.category, k, l)]


def faithfulness_check(spec: FiberSpec, k: int, l: int) -> bool:
    """Linear independence of the images of the basis of Hom(k, l).

    A stored scale factor multiplies each image by a nonzero constant, which
    does not change independence.
    """
    images = basis_images(spec, k, l)
    if not images:
        return True
    vecs = []
    for m in images:
        row = [spec.ctx.zero()] * (m.rows * m.cols)
        for (i, j), x in m.data.items():
            row[i * m.cols + j] = x
        vecs.append(row)
    # drop coordinates that vanish in every image
    keep = [c for c in range(len(vecs[0])) if any(not _zero(v[c]) for v in vecs)]
    vecs = [[v[c] for c in keep] for v in vecs]
    return mat_rank(vecs, spec.ctx) == len(vecs)


# standard specs --------------------------------------------------------------------------


def standard_bilinear(category: str, ctx: QContext, x=1):
    q = ctx.q
    if category == "sl2":
        x = ctx.const(x)
        return [[ctx.zero(), x], [-q * x, ctx.zero()]]
    if category == "gl2":
        x = ctx.const(x)
        return [[ctx.zero(), x], [q * x, ctx.zero()]]
    raise TypeMismatch("so3 standard data comes from sym2_standard_pair")


def sl2_standard_spec(ctx: QContext | None = None, x=1) -> FiberSpec:
    ctx = ctx or QContext.generic()
    return FiberSpec("sl2", 2, standard_bilinear("sl2", ctx, x), ctx)


def _sym2_pieces(ctx: QContext):
    q = ctx.q
    two = ctx.qint(2)
    z, one = ctx.zero(), ctx.one()
    m1 = [[z, -q], [one, z]]
    n1 = [[z, one], [-1 / q, z]]
    split = [[[z, z], [z, z]] for _ in range(3)]
    split[0][0][0] = two
    split[1][0][1] = 1 / q
    split[1][1][0] = one
    split[2][1][1] = two
    merge = [[[z, z], [z, z]] for _ in range(3)]
    merge[0][0][0] = one
    merge[1][0][1] = one
    merge[1][1][0] = q
    merge[2][1][1] = one
    return m1, n1, split, merge


def sym2_matrices(ctx: QContext):
    """(M3, N3, raw tup tensor, s**2) from exploding Sym^2 strands into pairs."""
    m1, n1, split, merge = _sym2_pieces(ctx)
    q = ctx.q
    two = ctx.qint(2)
    r2 = range(2)
    M0 = [[ctx.zero() for _ in range(3)] for _ in range(3)]
    N0 = [[ctx.zero() for _ in range(3)] for _ in range(3)]
    for a in range(3):
        for b in range(3):
            accm, accn = ctx.zero(), ctx.zero()
            for i, j, k, l in itertools.product(r2, r2, r2, r2):
                accm = accm + split[a][i][j] * split[b][k][l] * m1[j][k] * m1[i][l]
                accn = accn + merge[a][i][j] * merge[b][k][l] * n1[j][k] * n1[i][l]
            M0[a][b] = accm / two
            N0[a][b] = accn / two
    raw = {}
    for a, b, c in itertools.product(range(3), repeat=3):
        acc = ctx.zero()
        for i, j, k, l, m, nn in itertools.product(r2, repeat=6):
            f = m1[j][k] * m1[l][m] * m1[i][nn]
            if _zero(f):
                continue
            acc = acc + split[a][i][j] * split[b][k][l] * split[c][m][nn] * f
        if not _zero(acc):
            raw[(a, b, c)] = acc
    sigma = (q * q + 1 / (q * q)) * two * two
    return M0, N0, raw, sigma


def sym2_standard_pair(ctx: QContext | None = None) -> FiberSpec:
    """so3, n=3 data obtained from Sym^2 of the sl2 standard representation."""
    ctx = ctx or QContext.generic()
    q = ctx.q
    if ctx.is_zero(q * q + 1 / (q * q)):
        raise UndefinedAtQ("q^2 + q^-2 = 0")
    M3, _, raw, sigma = sym2_matrices(ctx)
    if ctx.exact:
        s = ctx.sqrt(sigma)
        if s is None:
            return FiberSpec("so3", 3, M3, ctx, Tensor3((3, 3, 3), raw), tensor_scale_sq=sigma)
    else:
        s = ctx.sqrt(sigma)
    T = Tensor3((3, 3, 3), {k: x / s for k, x in raw.items()})
    return FiberSpec("so3", 3, M3, ctx, T)


def gl2_standard_triple(n: int, M, ctx: QContext | None = None, P: int = 1) -> FiberSpec:
    """(M, P, T) with T(v_i, 1, v_k) = M(v_i, v_k)."""
    ctx = ctx or QContext.generic()
    T = Tensor3((n, 1, n), {(i, 0, k): M[i][k] for i in range(n) for k in range(n)})
    spec = FiberSpec("gl2", n, M, ctx, T, P)
    ok, _ = check_trace_condition(spec)
    if not ok:
        raise TraceConditionFailed("tr(M^T M^-1) != [2]")
    return spec


def veronese_cuboid() -> Tensor3:
    ent = {(0, 1, 2): -1, (0, 2, 1): 1, (1, 0, 2): -1, (1, 2, 0): 1, (2, 1, 0): -1, (2, 0, 1): 1}
    return Tensor3((3, 3, 3), {k: Fraction(v) for k, v in ent.items()})
