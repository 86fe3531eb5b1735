from fractions import Fraction

import pytest
from hypothesis import given, settings

from dq.cohomlab import MultiDiffOp
from dq.starops import (Equivalence, PoissonTensor, conformal_poisson, conformal_star, conformal_star_series,
                        in_preferred_algebra, moyal, moyal_bracket, moyal_cochains, normal_equivalence,
                        ordering_product, poisson, poisson_power, standard_equivalence, transported_cochains,
                        transported_product)
from dq.symcore import I, Poly, TruncSeries, phase_space
from helpers import P, polys
from oracles import moyal_oracle, poisson_oracle

S1, S2 = phase_space(1), phase_space(2)
H = P("(p1^2+q1^2)/2")


def test_poisson_examples():
    assert poisson(P("q1"), P("p1")) == P("1")
    assert poisson(H, H) == Poly.zero(S1)
    assert poisson(H, P("q1")) == P("-p1")


def test_poisson_power_examples():
    assert poisson_power(H, H, 2) == P("2")
    assert poisson_power(P("q1^2"), P("p1^5*q1^3"), 3) == Poly.zero(S1)
    u, v = P("q1^2*p1"), P("p1^3+q1")
    assert poisson_power(u, v, 1) == poisson(u, v)
    with pytest.raises(ValueError):
        poisson_power(u, v, 0)


def test_moyal_examples():
    assert moyal(P("1"), H) == H
    assert moyal(P("q1"), P("p1")) == P("q1*p1 + i*hbar/2")
    assert moyal(P("q1^2"), P("p1^2")) == P("q1^2*p1^2 + 2*i*hbar*q1*p1 - hbar^2/2")


def test_moyal_bracket_examples():
    assert moyal_bracket(P("q1"), P("p1")) == P("1")
    assert moyal_bracket(P("p1^2"), P("q1^2")) == P("-4*q1*p1")


def test_moyal_rejects_mixed_spaces():
    with pytest.raises(ValueError):
        moyal(P("q1"), P("q1", ell=2))


@settings(max_examples=40, deadline=None)
@given(polys(S2, max_degree=4), polys(S2, max_degree=4))
def test_moyal_matches_pairwise_expansion(u, v):
    assert moyal(u, v) == moyal_oracle(u, v)


@settings(max_examples=40, deadline=None)
@given(polys(S2, max_degree=4), polys(S2, max_degree=4), polys(S2, max_degree=4))
def test_poisson_leibniz_and_oracle(u, v, w):
    assert poisson(u * v, w) == poisson(u, w) * v + u * poisson(v, w)
    assert poisson(u, v) == poisson_oracle(u, v)


@settings(max_examples=40, deadline=None)
@given(polys(S1, max_degree=4), polys(S1, max_degree=4), polys(S1, max_degree=4))
def test_associativity_and_jacobi(u, v, w):
    assert moyal(moyal(u, v), w) == moyal(u, moyal(v, w))
    jac = (moyal_bracket(moyal_bracket(u, v), w) + moyal_bracket(moyal_bracket(v, w), u)
           + moyal_bracket(moyal_bracket(w, u), v))
    assert not jac


@settings(max_examples=40, deadline=None)
@given(polys(S2, max_degree=5), polys(S2, max_degree=5))
def test_degree_bound_and_classical_limit(u, v):
    diff = moyal(u, v) - u * v
    assert diff.hbar_degree() <= min(u.degree(), v.degree()) or not diff
    assert moyal(u, v).subs_hbar_zero() == u * v
    comm = (moyal(u, v) - moyal(v, u)) * Poly.const(S2, -I)
    assert comm.hbar_part(1) == poisson(u, v)


def test_orderings():
    q, p = P("q1"), P("p1")
    assert ordering_product(q, p, "weyl") == P("q1*p1 + i*hbar/2")
    assert ordering_product(q, p, "standard") == P("q1*p1")
    assert ordering_product(p, q, "standard") == P("q1*p1 - i*hbar")
    # commutator is equivalence invariant at first order
    for o in ("weyl", "standard", "normal"):
        assert ordering_product(q, p, o) - ordering_product(p, q, o) == P("i*hbar")
        assert ordering_product(P("1"), H, o) == H
    assert ordering_product(q, p, "normal") == P("q1*p1 + i*hbar/2")
    with pytest.raises(ValueError):
        ordering_product(q, p, "antinormal")


@settings(max_examples=15, deadline=None)
@given(polys(S1, max_degree=3), polys(S1, max_degree=3), polys(S1, max_degree=3))
def test_ordered_products_associative(u, v, w):
    for o in ("standard", "normal"):
        assert ordering_product(ordering_product(u, v, o), w, o) == ordering_product(u, ordering_product(v, w, o), o)


def test_transport_identity_and_rejection():
    u, v = P("q1^2*p1"), P("p1^2 + q1")
    assert transported_product(u, v, Equivalence(S1, ()), order=4) == moyal(u, v).truncate_hbar(4)
    with pytest.raises(ValueError):
        Equivalence.from_series(S1, [MultiDiffOp.zero(S1, 1)])


def test_equivalence_preserves_skew_part():
    base = moyal_cochains(1, 4)
    for T in (standard_equivalence(S1, 3), normal_equivalence(S1, 3)):
        C1 = transported_cochains(T, base, 3).C(1)
        assert (C1 - base.C(1)).is_symmetric()
        assert C1.skew_part() == base.C(1).skew_part()


def test_transported_cochains_reproduce_product():
    T = standard_equivalence(S1, 4)
    cs = transported_cochains(T, moyal_cochains(1, 8), 4)
    u, v = P("q1^2*p1"), P("p1^2*q1 + q1")
    assert cs.product(u, v) == transported_product(u, v, T, order=4)


def test_conformal_star():
    u, v, w = P("q1^2"), P("p1*q1"), P("p1^2 + q1")
    one = TruncSeries("beta", [P("1")], order=2)
    assert conformal_star(u, v, one) == TruncSeries("beta", [moyal(u, v)], order=2)
    f = TruncSeries("beta", [P("1"), P("q1*p1"), P("p1^2")])
    assoc = (conformal_star_series(conformal_star(u, v, f), TruncSeries("beta", [w], order=2), f)
             - conformal_star_series(TruncSeries("beta", [u], order=2), conformal_star(v, w, f), f))
    assert assoc.is_zero()
    with pytest.raises(ValueError):
        conformal_star(u, v, TruncSeries("beta", [P("0"), P("1")]))


def test_conformal_poisson():
    u, v, f = P("q1^2*p1"), P("p1 + q1^3"), P("1 + q1*p1")
    assert conformal_poisson(u, v, P("1")) == poisson(u, v)
    assert conformal_poisson(P("1"), v, f) == poisson(f, v)
    assert not (conformal_poisson(u, v, f) + conformal_poisson(v, u, f))


def test_preferred_algebra():
    assert in_preferred_algebra(P("p1^2 + p1*q1"))
    assert not in_preferred_algebra(P("p1^3"))
    assert moyal_bracket(P("p1^3"), P("q1^3")) != poisson(P("p1^3"), P("q1^3"))
    assert in_preferred_algebra(P("5"))


@settings(max_examples=30, deadline=None)
@given(polys(S2, max_degree=2), polys(S2, max_degree=5))
def test_quadratic_brackets_are_classical(h, u):
    assert moyal_bracket(h, u) == poisson(h, u)


def test_poisson_tensor_hash_and_brackets():
    A, B = PoissonTensor.canonical(1), PoissonTensor.canonical(S1)
    assert A == B and hash(A) == hash(B)
    so3 = PoissonTensor.so3()
    x = [Poly.var(so3.space, i) for i in range(3)]
    assert so3.bracket(x[0], x[1]) == x[2]
    assert so3.bracket(x[1], x[2]) == x[0]
    assert so3.bracket(x[2], x[0]) == x[1]
    assert A.scale(Fraction(2)).bracket(P("q1"), P("p1")) == P("2")
