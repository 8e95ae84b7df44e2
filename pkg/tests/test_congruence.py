from __future__ import annotations

import cmath
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from webcat.congruence import (
    Block,
    CanonicalForm,
    QuadRoot,
    build_block,
    canonical_form,
    congruent,
    cosquare,
    direct_sum,
    gamma_block,
    h_block,
    jordan_block,
    jordan_structure,
    quantum_trace,
)
from webcat.errors import SingularMatrix
from webcat.qscalar import FieldElement, QContext
from webcat.serialize import canonical_from_json

from conftest import generic_q_samples

v = FieldElement.v()
q = v * v
QS = generic_q_samples(1, seed=11)[0]


def S1(qv):
    return [[0, -qv], [1, 0]]


# blocks ----------------------------------------------------------------------------


def test_small_gamma_blocks():
    assert gamma_block(1) == [[1]]
    assert gamma_block(2) == [[0, -1], [1, 1]]


def test_h_block_layout():
    assert h_block(1, 5) == [[0, 1], [5, 0]]
    assert h_block(2, 5) == [[0, 0, 1, 0], [0, 0, 0, 1], [5, 1, 0, 0], [0, 5, 0, 0]]
    assert build_block("J", 2, 4) == jordan_block(2, 4)
    with pytest.raises(ValueError):
        build_block("X", 2)


@pytest.mark.parametrize("j", range(1, 7))
def test_gamma_trace_formula(j):
    assert quantum_trace(gamma_block(j)) == (-1) ** (j + 1) * j


def test_gamma_cosquare_is_single_jordan_block():
    for j in range(1, 6):
        C = np.array(cosquare(gamma_block(j), QContext("numeric", 1.0)))
        lam = (-1) ** (j + 1)
        N = C - lam * np.eye(j)
        assert np.linalg.matrix_rank(N) == j - 1
        assert np.allclose(np.linalg.matrix_power(N, j), 0)


def test_trace_examples():
    assert quantum_trace(h_block(1, FieldElement.from_rational(3))) == FieldElement.from_rational(Fraction(10, 3))
    lam = 2.5 + 1j
    assert abs(quantum_trace(direct_sum(gamma_block(1), h_block(1, lam))) - (1 + lam + 1 / lam)) < 1e-12
    assert quantum_trace(S1(q)) == -(q + 1 / q)


def test_trace_additivity_random():
    rng = np.random.default_rng(5)
    for _ in range(50):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        s = quantum_trace(direct_sum(a.tolist(), b.tolist()))
        assert abs(s - quantum_trace(a.tolist()) - quantum_trace(b.tolist())) < 1e-8 * max(1, abs(s))


def _cayley(rng, n):
    K = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    K = (K - K.T) / 4
    I = np.eye(n)
    return (I - K) @ np.linalg.inv(I + K)


def test_trace_orthogonal_invariance():
    rng = np.random.default_rng(6)
    for _ in range(50):
        n = int(rng.integers(2, 5))
        A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        P = _cayley(rng, n)
        assert np.allclose(P.T @ P, np.eye(n))
        t0, t1 = quantum_trace(A.tolist()), quantum_trace((P.T @ A @ P).tolist())
        assert abs(t0 - t1) < 1e-7 * max(1, abs(t0))


# canonical forms ---------------------------------------------------------------------


def test_standard_solution_form_numeric():
    for qv in generic_q_samples(5):
        f = canonical_form(S1(qv), eps=1e-9)
        assert f.same_as(CanonicalForm((Block("H", 1, -qv),)))
        assert f.same_as(CanonicalForm((Block("H", 1, -1 / qv),)))


def test_standard_solution_form_exact():
    f = canonical_form(S1(q), mode="exact")
    assert f.to_json() == {"blocks": [{"kind": "H", "k": 1, "lambda": str(-q)}]}


def test_identity_is_two_gammas():
    f = canonical_form([[1, 0], [0, 1]])
    assert f.to_json() == {"blocks": [{"kind": "Gamma", "j": 1}] * 2}


def test_gamma2_not_congruent_to_identity():
    assert not congruent(gamma_block(2), [[1, 0], [0, 1]])
    assert not congruent(gamma_block(2), [[1, 0], [0, 1]], mode="exact")


def test_singular_rejected():
    with pytest.raises(SingularMatrix):
        canonical_form([[1, 0], [0, 0]])


def test_exact_quadratic_eigenvalue():
    # cosquare eigenvalues are roots of an irreducible quadratic over Q
    A = [[1, 2], [0, 1]]
    f = canonical_form(A, mode="exact")
    assert len(f.blocks) == 1 and f.blocks[0].kind in ("H", "Gamma")
    g = canonical_form(A)
    assert g.size() == 2


def _random_invertible(rng, n):
    while True:
        P = rng.integers(-5, 6, (n, n))
        if abs(np.linalg.det(P)) > 0.5:
            return P


@pytest.mark.parametrize(
    "name",
    ["S1", "Gamma3", "H2(3)", "Gamma1+H2(2)"],
)
def test_congruence_invariance_100(name):
    A = {
        "S1": np.array(S1(QS), dtype=complex),
        "Gamma3": np.array(gamma_block(3), dtype=complex),
        "H2(3)": np.array(h_block(1, 3), dtype=complex),
        "Gamma1+H2(2)": np.array(direct_sum(gamma_block(1), h_block(1, 2)), dtype=complex),
    }[name]
    ref = canonical_form(A, eps=1e-9)
    rng = np.random.default_rng(len(name) * 101)
    n = A.shape[0]
    for _ in range(100):
        P = _random_invertible(rng, n)
        assert canonical_form(P.T @ A @ P, eps=1e-9).same_as(ref)


def test_invariance_larger_structure():
    A = np.array(direct_sum(gamma_block(1), gamma_block(2), h_block(2, 2.5 + 1j)), dtype=complex)
    rng = np.random.default_rng(0)
    for _ in range(20):
        P = _random_invertible(rng, 7)
        assert congruent(A, P.T @ A @ P)


def test_exact_congruence_with_rational_p():
    A = direct_sum(gamma_block(1), h_block(1, 2))
    P = np.array([[1, 2, 0], [0, 1, -1], [3, 0, 1]])
    B = (P.T @ np.array(A) @ P).tolist()
    assert congruent(A, B, mode="exact")


def test_lambda_inverse_equivalence():
    assert congruent(h_block(1, 3), h_block(1, 1 / 3))
    assert not congruent(h_block(1, 3), h_block(1, 2))


def test_jordan_structure_perturbed_pair():
    C = np.array(jordan_block(2, 2.0), dtype=complex)
    C[1, 0] = 1e-14
    st_ = jordan_structure(C)
    assert len(st_) == 1 and sorted(st_[0][1]) == [2]


def test_canonical_json_round_trip():
    f = canonical_form(direct_sum(gamma_block(2), h_block(1, 3)))
    assert canonical_from_json(f.to_json()).same_as(f)
    g = canonical_form(S1(q), mode="exact")
    assert canonical_from_json(g.to_json()).same_as(g)


def test_quadroot_numeric():
    r = QuadRoot(FieldElement.one(), FieldElement.from_rational(3), FieldElement.one())
    a, b = r.numeric_roots()
    assert abs(a * b - 1) < 1e-12 and abs(a + b + 3) < 1e-12


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.integers(-4, 4), min_size=9, max_size=9),
    st.floats(0.3, 3.0),
    st.floats(0.2, 2.9),
)
def test_property_congruence_invariance(pent, r, theta):
    P = np.array(pent).reshape(3, 3)
    if abs(np.linalg.det(P)) < 0.5:
        return
    lam = r * cmath.exp(1j * theta)
    A = np.array(direct_sum(gamma_block(1), h_block(1, lam)), dtype=complex)
    assert congruent(A, P.T @ A @ P)
