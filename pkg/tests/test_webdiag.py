from __future__ import annotations

from math import comb

import pytest

from webcat import webdiag as wd
from webcat.errors import TypeMismatch
from webcat.fiber import evaluate, sl2_standard_spec
from webcat.qscalar import QContext


def catalan(m: int) -> int:
    return comb(2 * m, m) // (m + 1)


def riordan(n: int) -> int:
    # planar partitions of n points without singletons, via the Motzkin-style recurrence
    r = [1, 0]
    for m in range(2, n + 1):
        r.append((m - 1) * (2 * r[m - 1] + 3 * r[m - 2]) // (m + 1))
    return r[n]


def test_zigzag_validates():
    d = wd.LayeredDiagram("sl2", ("x",), ((1, "cup"), (0, "cap")))
    assert d.validate() == ("x",)


def test_identity_validates():
    assert wd.identity("sl2", "xx").validate() == ("x", "x")


def test_type_mismatch_names_layer():
    d = wd.LayeredDiagram("gl2", ("y", "x"), ((0, "cap"),))
    with pytest.raises(TypeMismatch) as err:
        d.validate()
    assert err.value.location == {"layer": 0}


def test_declared_codomain_checked():
    d = wd.LayeredDiagram("sl2", ("x", "x"), ((0, "cap"),), codomain=("x",))
    with pytest.raises(TypeMismatch):
        d.validate()


def test_compose_and_tensor():
    cap = wd.generator("sl2", "cap")
    cup = wd.LayeredDiagram("sl2", (), ((0, "cup"),))
    assert wd.compose(cap, cup).validate() == ()
    t = wd.tensor(wd.identity("sl2", "x"), cap)
    assert t.layers == ((1, "cap"),)
    f = wd.generator("so3", "tdown")
    g = wd.generator("so3", "cap")
    a = wd.compose(wd.tensor(f, wd.identity("so3", "")), wd.tensor(wd.identity("so3", ""), g))
    assert a.validate() == ("x", "x", "x")
    with pytest.raises(TypeMismatch):
        wd.compose(cap, cap)


def test_interchange():
    ctx = QContext.generic()
    spec = sl2_standard_spec(ctx)
    f = wd.generator("sl2", "cap")
    g = wd.LayeredDiagram("sl2", ("x",), ())
    left = wd.compose(wd.tensor(wd.identity("sl2", ""), g), wd.tensor(f, wd.identity("sl2", "x")))
    right = wd.LayeredDiagram("sl2", ("x", "x", "x"), ((0, "cap"),))
    assert left.validate() == right.validate()
    assert evaluate(spec, left) == evaluate(spec, right)


def test_json_round_trip():
    d = wd.LayeredDiagram("so3", ("x", "x", "x"), ((0, "tup"),))
    obj = d.to_json()
    assert obj == {"category": "so3", "domain": ["x", "x", "x"], "codomain": [], "layers": [{"offset": 0, "gen": "tup"}]}
    assert wd.LayeredDiagram.from_json(obj) == d


@pytest.mark.parametrize("k,count", [(0, 1), (1, 0), (2, 1), (3, 0), (4, 2), (5, 0), (6, 5), (8, 14), (10, 42)])
def test_matching_counts(k, count):
    assert len(wd.enumerate_matchings(k, 0)) == count
    if k % 2 == 0:
        assert count == catalan(k // 2)


@pytest.mark.parametrize("k,count", list(enumerate([1, 0, 1, 1, 3, 6, 15, 36, 91, 232, 603])))
def test_planar_partition_counts(k, count):
    assert len(wd.enumerate_planar_partitions(k, 0)) == count
    assert count == riordan(k)


def test_counts_depend_only_on_total():
    for k in range(0, 6):
        for l in range(0, 6):
            assert len(wd.enumerate_planar_partitions(k, l)) == riordan(k + l)
            assert len(wd.enumerate_matchings(k, l)) == (catalan((k + l) // 2) if (k + l) % 2 == 0 else 0)


def test_small_realizations():
    m = wd.Matching(2, 0, ((1, 2),))
    assert wd.matching_to_diagram(m).layers == ((0, "cap"),)
    p = wd.PlanarPartition(3, 0, ((1, 2, 3),))
    assert wd.partition_to_diagram(p).layers == ((0, "tup"),)
    p4 = wd.PlanarPartition(4, 0, ((1, 2, 3, 4),))
    d = wd.partition_to_diagram(p4)
    assert d.validate() == ()
    assert d.vertex_count() == 2
    assert wd.diagram_graph(d)["blocks"] == [(1, 2, 3, 4)]


def test_partitions_realized_faithfully():
    for k in range(0, 6):
        for l in range(0, 6):
            for p in wd.enumerate_planar_partitions(k, l):
                d = wd.partition_to_diagram(p)
                assert d.validate() == ("x",) * l
                assert d.domain == ("x",) * k
                assert wd.is_forest(d)
                assert wd.diagram_graph(d)["blocks"] == list(p.blocks)


def test_crossing_partitions_rejected():
    with pytest.raises(ValueError):
        wd.PlanarPartition(4, 0, ((1, 3), (2, 4)))
    with pytest.raises(ValueError):
        wd.PlanarPartition(3, 0, ((1, 2), (3,)))


def test_sl2_basis_matches_matchings():
    for m in wd.enumerate_matchings(3, 3):
        d = wd.matching_to_diagram(m)
        assert d.validate() == ("x",) * 3
        assert wd.diagram_graph(d)["blocks"] == list(m.blocks)


@pytest.mark.parametrize("n", range(0, 9))
def test_gl2_counts_equal_sl2(n):
    phantoms = ("p",) * (n // 2)
    assert len(wd.gl2_basis(("x",) * n, phantoms)) == len(wd.enumerate_matchings(n, 0))


def test_gl2_small_bases():
    assert len(wd.gl2_basis(("x", "y"), ())) == 1
    assert len(wd.gl2_basis(("x",), ("x",))) == 1
    assert len(wd.gl2_basis(("x", "x"), ("x", "x"))) == 2
    # four upward strands carry charge 4 and cannot close off without phantoms
    assert wd.gl2_basis(("x",) * 4, ()) == []


def test_gl2_basis_diagrams_validate():
    for dom, cod in [("xxxx", "pp"), ("xy", ""), ("xxy", "x"), ("xpy", "p"), ("xx", "xx"), ("xyxy", "")]:
        for d in wd.gl2_basis(tuple(dom), tuple(cod)):
            assert d.validate() == tuple(cod)


def test_closed_circles():
    assert wd.circle("sl2").validate() == ()
    assert wd.circle("gl2").validate() == ()
