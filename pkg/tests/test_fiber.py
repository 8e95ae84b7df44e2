from __future__ import annotations

import math

import numpy as np
import pytest

from webcat import webdiag as wd
from webcat.congruence import congruent
from webcat.errors import DimensionCap, TraceConditionFailed, TypeMismatch
from webcat.fiber import (
    FiberSpec,
    Tensor3,
    all_pass,
    basis_images,
    bent_maps,
    check_all_relations,
    check_trace_condition,
    crossing_matrix,
    evaluate,
    evaluate_raw,
    faithfulness_check,
    flip_matrix,
    flip_test,
    gl2_standard_triple,
    quantum_trace_of,
    sl2_standard_spec,
    standard_bilinear,
    sym2_standard_pair,
    veronese_cuboid,
)
from webcat.qscalar import FieldElement, QContext, quantum_integer
from webcat.serialize import spec_from_json, spec_to_json

from conftest import generic_q_samples

v = FieldElement.v()
q = v * v


def D(cat, dom, layers):
    return wd.LayeredDiagram(cat, tuple(dom), tuple(layers))


def scalar(m):
    assert m.shape == (1, 1)
    return m.get(0, 0, 0)


# closed diagrams ---------------------------------------------------------------


def test_sl2_circle():
    assert scalar(evaluate(sl2_standard_spec(), wd.circle("sl2"))) == -q - 1 / q


def test_gl2_closed_values():
    g = gl2_standard_triple(2, standard_bilinear("gl2", QContext.generic()))
    assert scalar(evaluate(g, D("gl2", "", [(0, "cup'"), (0, "cap")]))) == q + 1 / q
    assert scalar(evaluate(g, D("gl2", "", [(0, "pcup'"), (0, "pcap")]))) == FieldElement.one()
    assert scalar(evaluate(g, D("gl2", "", [(0, "tdown"), (0, "tup")]))) == q + 1 / q


def test_so3_closed_values():
    s = sym2_standard_pair()
    assert scalar(evaluate(s, wd.circle("so3"))) == q * q + 1 + 1 / (q * q)
    theta = D("so3", "", [(0, "tdown"), (0, "tup")])
    assert scalar(evaluate(s, theta)) == -quantum_integer(3)
    # monogon: a vertex with two of its legs joined
    mono = D("so3", "x", [(0, "cup"), (0, "tup")])
    assert evaluate(s, mono).is_zero(0.0)


# relations ------------------------------------------------------------------------


def test_sl2_standard_relations_exact():
    assert all_pass(check_all_relations(sl2_standard_spec()))


def test_sl2_relations_other_x():
    # any nonzero x gives a solution for the standard shape
    assert all_pass(check_all_relations(sl2_standard_spec(x=FieldElement.from_rational(3))))


def test_identity_matrix_fails_circle():
    ctx = QContext.generic()
    spec = FiberSpec("sl2", 2, [[ctx.one(), ctx.zero()], [ctx.zero(), ctx.one()]], ctx)
    report = {r.name: r for r in check_all_relations(spec)}
    assert report["zigzag_left"].passed
    assert not report["circle"].passed


def test_so3_relations_exact():
    report = check_all_relations(sym2_standard_pair())
    names = {r.name for r in report}
    assert "H=I" in names and "vertex_rotation" in names
    assert all_pass(report)


@pytest.mark.parametrize("qv", generic_q_samples(5, seed=3))
def test_so3_relations_numeric(qv):
    assert all_pass(check_all_relations(sym2_standard_pair(QContext.numeric_q(qv))))


def test_so3_trace_and_q1_form():
    s = sym2_standard_pair()
    assert quantum_trace_of(s) == quantum_integer(3)
    s1 = sym2_standard_pair(QContext.exact_v(1))
    P = [[1, 0, 0], [0, 0, 1], [0, 1, 0]]
    assert congruent(s1.M, P, mode="exact", ctx=s1.ctx)


def test_gl2_triple_relations_exact():
    g = gl2_standard_triple(2, standard_bilinear("gl2", QContext.generic()))
    report = check_all_relations(g)
    names = {r.name for r in report}
    for required in ("H=I", "vertical=horizontal_pq", "T_snake", "T_snake_mirror"):
        assert required in names
    assert all_pass(report)


def test_gl2_triple_rejects_bad_trace():
    ctx = QContext.generic()
    with pytest.raises(TraceConditionFailed):
        gl2_standard_triple(2, [[ctx.one(), ctx.zero()], [ctx.zero(), ctx.one()]], ctx)


def test_trace_condition_report():
    ok, info = check_trace_condition(sl2_standard_spec())
    assert ok and info["trace"] == -(q + 1 / q)


# braiding ---------------------------------------------------------------------------


def _braid_residuals(spec, cat):
    r2 = evaluate(spec, D(cat, "xx", [(0, "cross_pos"), (0, "cross_neg")])).to_numpy()
    a = evaluate(spec, D(cat, "xxx", [(0, "cross_pos"), (1, "cross_pos"), (0, "cross_pos")])).to_numpy()
    b = evaluate(spec, D(cat, "xxx", [(1, "cross_pos"), (0, "cross_pos"), (1, "cross_pos")])).to_numpy()
    return np.abs(r2 - np.eye(r2.shape[0])).max(), np.abs(a - b).max()


@pytest.mark.parametrize("qv", generic_q_samples(5))
def test_braid_sl2(qv):
    r2, yb = _braid_residuals(sl2_standard_spec(QContext.numeric_q(qv)), "sl2")
    assert r2 < 1e-9 and yb < 1e-9


@pytest.mark.parametrize("qv", generic_q_samples(5))
def test_braid_so3(qv):
    r2, yb = _braid_residuals(sym2_standard_pair(QContext.numeric_q(qv)), "so3")
    assert r2 < 1e-9 and yb < 1e-9


def _find_permutation(A, B, eps=1e-9):
    """Simultaneous row/column permutation p with A[p][:, p] == B, by backtracking."""
    n = len(A)
    p: list[int] = []

    def ok(k):
        i = k - 1
        return all(
            abs(A[p[i], p[j]] - B[i, j]) < eps and abs(A[p[j], p[i]] - B[j, i]) < eps for j in range(k)
        )

    def search():
        if len(p) == n:
            return True
        for c in range(n):
            if c in p:
                continue
            p.append(c)
            if ok(len(p)) and search():
                return True
            p.pop()
        return False

    return p if search() else None


def test_nine_by_nine_crossing():
    r5 = math.sqrt(5)
    x, xg, y, yg = (-3 + r5) / 2, (-3 - r5) / 2, (-1 + r5) / 2, (-1 - r5) / 2
    ctx = QContext("numeric", 1 + 0j)
    spec = FiberSpec("sl2", 3, [[1, 0, 0], [0, 0, 1], [0, x, 0]], ctx)
    C = crossing_matrix(spec).to_numpy()
    ref = np.eye(9)
    ref[0] = [2, 0, 0, 0, 0, x, 0, 1, 0]
    ref[5] = [1, 0, 0, 0, 0, y, 0, 1, 0]
    ref[7] = [xg, 0, 0, 0, 0, 1, 0, yg, 0]
    assert _find_permutation(C, ref) is not None
    assert np.abs(C @ C - np.eye(9)).max() < 1e-9
    assert not flip_test(spec)


def test_flip_only_for_standard_q1():
    assert flip_test(sl2_standard_spec(QContext.exact_v(1)))
    assert not flip_test(sl2_standard_spec(QContext("numeric", 1j)))
    assert not flip_test(sl2_standard_spec(QContext.numeric_q(generic_q_samples(1)[0])))


def test_flip_matrix_is_involution():
    F = flip_matrix(3)
    assert F @ F == type(F).identity(9)


# faithfulness -------------------------------------------------------------------------


def test_faithful_sl2_33():
    spec = sl2_standard_spec()
    assert len(basis_images(spec, 3, 3)) == 5
    assert faithfulness_check(spec, 3, 3)


def test_faithful_so3_33():
    spec = sym2_standard_pair()
    assert len(basis_images(spec, 3, 3)) == 15
    assert faithfulness_check(spec, 3, 3)


def test_faithful_at_root_of_unity():
    # Temperley-Lieb still acts faithfully on tensor space when [2] = 0
    spec = sl2_standard_spec(QContext("numeric", complex(math.cos(math.pi / 4), math.sin(math.pi / 4))))
    assert faithfulness_check(spec, 3, 3)


def test_one_dimensional_fiber_is_not_faithful():
    ctx = QContext.generic()
    spec = FiberSpec("sl2", 1, [[ctx.one()]], ctx)
    assert not faithfulness_check(spec, 2, 2)


# functoriality -------------------------------------------------------------------------


def test_functoriality_compose_and_tensor():
    spec = sl2_standard_spec()
    a = D("sl2", "xx", [(0, "cap"), (0, "cup")])
    b = D("sl2", "xx", [(0, "cross_pos")])
    assert evaluate(spec, wd.compose(a, b)) == evaluate(spec, a) @ evaluate(spec, b)
    assert evaluate(spec, wd.tensor(a, b)) == evaluate(spec, a).kron(evaluate(spec, b))


def test_bent_maps_shapes():
    s = sym2_standard_pair()
    lo, up = bent_maps(s)
    assert lo.shape == (3, 9) and up.shape == (9, 3)


def test_bent_maps_need_trilinear():
    with pytest.raises(TypeMismatch):
        bent_maps(sl2_standard_spec())


def test_dimension_cap():
    spec = sl2_standard_spec()
    spec.cap = 10
    with pytest.raises(DimensionCap):
        evaluate(spec, wd.identity("sl2", "xxxx"))


def test_scaled_odd_vertex_evaluation():
    s = sym2_standard_pair(QContext.exact_v(2))
    ev = evaluate_raw(s, D("so3", "x", [(0, "tdown")]))
    assert ev.vertices == 1


def test_spec_json_round_trip():
    for spec in (sl2_standard_spec(), sym2_standard_pair(), gl2_standard_triple(2, standard_bilinear("gl2", QContext.generic()))):
        back = spec_from_json(spec_to_json(spec))
        assert back.category == spec.category and back.M == spec.M
        assert spec_to_json(back) == spec_to_json(spec)


# Veronese cuboid ------------------------------------------------------------------------


def test_veronese_monogons_at_q1():
    ctx = QContext.exact_v(1)
    P = [[ctx.const(x) for x in row] for row in ([1, 0, 0], [0, 0, 1], [0, 1, 0])]
    T = veronese_cuboid()
    spec = FiberSpec("so3", 3, P, ctx, Tensor3(T.dims, {k: ctx.const(x) for k, x in T.entries.items()}))
    report = {r.name: r.passed for r in check_all_relations(spec)}
    for name in ("monogon_tup_left", "monogon_tup_right", "monogon_tdown_left", "monogon_tdown_right"):
        assert report[name], name
