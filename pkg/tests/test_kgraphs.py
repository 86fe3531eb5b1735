import random

import pytest

from dq.kgraphs import AdmissibleGraph, GraphError, enumerate_graphs, graph_count, graph_operator
from dq.starops import PoissonTensor, poisson, poisson_power
from dq.symcore import Poly, phase_space
from helpers import P, random_poly


@pytest.mark.parametrize("n,count", [(0, 1), (1, 2), (2, 36), (3, 1728)])
def test_counts(n, count):
    gs = enumerate_graphs(n)
    assert len(gs) == count == graph_count(n)
    assert len(set(gs)) == count


def test_count_n4():
    assert len(enumerate_graphs(4)) == 160000


def test_bound_and_validation():
    with pytest.raises(GraphError):
        enumerate_graphs(5)
    with pytest.raises(GraphError):
        AdmissibleGraph(1, (("L", "L"),))
    with pytest.raises(GraphError):
        AdmissibleGraph(2, ((1, "L"), ("L", "R")))
    with pytest.raises(GraphError):
        AdmissibleGraph(1, (("L", 3),))


def test_text_roundtrip():
    for g in enumerate_graphs(2)[::5]:
        assert AdmissibleGraph.parse(g.text()) == g
    assert AdmissibleGraph(0, ()).text() == "0"
    assert AdmissibleGraph.parse("2; v1:(2,L); v2:(L,R)").edges == ((2, "L"), ("L", "R"))
    with pytest.raises(GraphError):
        AdmissibleGraph.parse("1; v2:(L,R)")


def test_operators_low_order():
    T = PoissonTensor.canonical(1)
    u, v = P("q1^2*p1 + q1"), P("p1^3 - q1*p1")
    assert graph_operator(AdmissibleGraph(0, ()), T, u, v) == u * v
    assert graph_operator(AdmissibleGraph(1, (("L", "R"),)), T, u, v) == poisson(u, v)
    assert graph_operator(AdmissibleGraph(1, (("R", "L"),)), T, u, v) == -poisson(u, v)


def test_wedge_graph_is_poisson_square():
    # two vertices both pointing (L, R) assemble P^2 with the same index pattern
    T = PoissonTensor.canonical(2)
    rng = random.Random(11)
    S = phase_space(2)
    for _ in range(5):
        u, v = random_poly(S, rng, degree=4), random_poly(S, rng, degree=4)
        g = AdmissibleGraph(2, (("L", "R"), ("L", "R")))
        assert graph_operator(g, T, u, v) == poisson_power(u, v, 2)


def test_operator_constant_tensor_kills_internal_edges():
    T = PoissonTensor.canonical(1)
    g = AdmissibleGraph(2, ((2, "L"), ("L", "R")))
    assert not graph_operator(g, T, P("q1^3*p1^2"), P("p1^2*q1"))


def test_operator_space_mismatch():
    with pytest.raises(ValueError):
        graph_operator(AdmissibleGraph(0, ()), PoissonTensor.canonical(1), P("q1"), P("q1", ell=2))


def test_operator_so3():
    T = PoissonTensor.so3()
    S = T.space
    u, v = Poly.var(S, 0) ** 2, Poly.var(S, 1) * Poly.var(S, 2)
    assert graph_operator(AdmissibleGraph(1, (("L", "R"),)), T, u, v) == T.bracket(u, v)
