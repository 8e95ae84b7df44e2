from __future__ import annotations

import cmath

import pytest

from webcat.congruence import canonical_form, gamma_block, h_block, quantum_trace
from webcat.errors import NoSolution
from webcat.qscalar import SAMPLE_V, FieldElement, specialize
from webcat.solutions import (
    BlockStructure,
    block_structures,
    enumerate_solutions,
    existence_witness,
    n1_nonexistence,
    parse_q,
    qnum,
    so3_dimensions_ok,
    special_q_values,
    target,
    witness_trace,
)

from conftest import generic_q_samples

v = FieldElement.v()
q = v * v


def structures(fams):
    return {(f.structure.gammas, f.structure.hs) for f in fams}


def test_block_structure_counts():
    # n = 2: Gamma1+Gamma1, Gamma2, H2
    assert len(block_structures(2)) == 3
    assert all(s.size == 4 for s in block_structures(4))
    assert BlockStructure((1, 2), (1,)).gamma_trace() == -1


def test_qnum_and_targets():
    assert qnum(2, q) == q + 1 / q
    assert qnum(3, q) == q * q + 1 + 1 / (q * q)
    assert target("sl2", q) == -(q + 1 / q)
    assert target("gl2", q) == q + 1 / q
    assert abs(qnum(3, 2.0) - 5.25) < 1e-12


def test_sl2_n2_generic():
    fams = enumerate_solutions("sl2", 2)
    assert structures(fams) == {((), (1,))}
    (f,) = fams
    assert set(f.roots) == {-q, -1 / q}


def test_sl2_n2_q1():
    fams = enumerate_solutions("sl2", 2, 1)
    assert structures(fams) == {((), (1,)), ((2,), ())}
    h = next(f for f in fams if f.kind == "explicit")
    # at q = 1 the quadratic has the double root -1
    assert all(r == FieldElement.from_rational(-1) for r in h.roots)


def test_sl2_n2_qminus1():
    # the standard solution is symmetric here and is itself Gamma1+Gamma1
    fams = enumerate_solutions("sl2", 2, -1)
    assert structures(fams) == {((1, 1), ())}
    S = [[0, 1], [1, 0]]
    assert canonical_form(S, mode="exact").to_json() == {"blocks": [{"kind": "Gamma", "j": 1}] * 2}


def test_sl2_n3_generic_quadratic_by_substitution():
    fams = enumerate_solutions("sl2", 3)
    assert structures(fams) == {((1,), (1,))}
    (f,) = fams
    a, b, c = f.quadratic
    assert (a, b, c) == (1, 1 + qnum(2, q), 1)
    for qv in generic_q_samples(5):
        aa, bb, cc = (specialize(x, cmath.sqrt(qv)) for x in (a, b, c))
        d = cmath.sqrt(bb * bb - 4 * aa * cc)
        for lam in ((-bb + d) / (2 * aa), (-bb - d) / (2 * aa)):
            M = [[1, 0, 0], [0, 0, 1], [0, lam, 0]]
            assert abs(quantum_trace(M) + (qv + 1 / qv)) < 1e-9


def test_sl2_n4_has_parametric_family():
    fams = enumerate_solutions("sl2", 4)
    par = [f for f in fams if f.kind == "parametric"]
    assert par and par[0].structure.hs == (1, 1) and par[0].free == 1


@pytest.mark.parametrize("n", [2, 3, 4])
def test_realized_families_solve_trace_equation(n):
    qn = specialize(q, SAMPLE_V)
    t = -(qn + 1 / qn)
    for f in enumerate_solutions("sl2", n):
        M = [[specialize(x, SAMPLE_V) if isinstance(x, FieldElement) else complex(x) for x in row] for row in f.realize()]
        assert abs(quantum_trace(M) - t) < 1e-8, str(f.structure)


def test_numeric_q_enumeration_matches_generic():
    qv = generic_q_samples(1, seed=4)[0]
    fams = enumerate_solutions("sl2", 3, qv)
    assert structures(fams) == {((1,), (1,))}
    lam = fams[0].roots[0]
    assert abs(1 + lam + 1 / lam + qv + 1 / qv) < 1e-9


def test_gl2_n2_generic():
    fams = enumerate_solutions("gl2", 2)
    assert structures(fams) == {((), (1,))}
    assert set(fams[0].roots) == {q, 1 / q}


def test_so3_filters():
    assert not so3_dimensions_ok(1) and not so3_dimensions_ok(2)
    assert so3_dimensions_ok(3) and so3_dimensions_ok(5)
    assert enumerate_solutions("so3", 2) == []
    fams = enumerate_solutions("so3", 3)
    assert any(f.structure == BlockStructure((1,), (1,)) for f in fams)


def test_n1_nonexistence():
    assert n1_nonexistence("sl2")
    assert n1_nonexistence("so3")
    w = cmath.exp(2j * cmath.pi / 3)
    # -(q + 1/q) = 1 at primitive cube roots of unity
    assert not n1_nonexistence("sl2", w)


def test_special_q_values():
    spec = {s.gammas: (roots, poly) for s, roots, poly in special_q_values("sl2", 3)}
    roots, poly = spec[(1, 2)]
    assert poly == (1, -1, 1)
    for r in roots:
        assert abs(-(r + 1 / r) - (1 - 2)) < 1e-12
    # at such a q the all-Gamma structure appears in the enumeration
    fams = enumerate_solutions("sl2", 3, roots[0])
    assert ((1, 2), ()) in structures(fams)
    assert ((1, 2), ()) not in structures(enumerate_solutions("sl2", 3))


@pytest.mark.parametrize("cat,n", [("sl2", 2), ("sl2", 3), ("sl2", 5), ("gl2", 2), ("gl2", 4), ("so3", 3), ("so3", 4)])
def test_witness_trace(cat, n):
    w = existence_witness(cat, n)
    tr = witness_trace(w, None)
    t = target(cat, q)
    if w.exact:
        assert tr == t
    else:
        assert abs(tr - specialize(t, SAMPLE_V)) < 1e-9


def test_witness_missing():
    with pytest.raises(NoSolution):
        existence_witness("sl2", 1)
    with pytest.raises(NoSolution):
        existence_witness("so3", 2)


def test_parse_q():
    assert parse_q("generic") == q
    assert parse_q("1/2") == FieldElement.from_rational(parse_q(1).constant_value() / 2)
    assert parse_q("1+2i") == 1 + 2j


def test_family_json():
    f = enumerate_solutions("sl2", 4)
    js = [x.to_json() for x in f]
    assert any(j["kind"] == "parametric" and j["free_parameters"] == 1 for j in js)
