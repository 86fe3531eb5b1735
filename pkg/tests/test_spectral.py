from fractions import Fraction

import pytest
from hypothesis import given, settings

from dq.spectral import (BiSeries, QuadraticHamiltonian, WeylElem, angular_momentum, bch_group_law, bch_series,
                         bch_via_log, casimir, casimir_star_constant, quadratic_closed_form, star_exp, star_power,
                         weyl_mul, weyl_quantize)
from dq.starops import moyal, moyal_bracket, poisson
from dq.symcore import I, Poly, Scalar, TruncSeries, phase_space
from helpers import P, polys

S1 = phase_space(1)
H = P("(p1^2+q1^2)/2")
INV_IH = Poly.const(S1, -I) * Poly.hbar(S1, -1)  # 1 / (i hbar)


def test_star_power_examples():
    assert star_power(H, 0) == P("1")
    assert star_power(H, 2) == H * H - P("hbar^2/4")
    K = P("p1*q1")
    assert star_power(K, 2) == K * K + P("hbar^2/4")


def test_star_exp_examples():
    e1 = star_exp(H, 1)
    assert e1.coeffs == (P("1"), H * INV_IH)
    e2 = star_exp(H, 2)
    assert e2.coeffs[2] == (H * H - P("hbar^2/4")) * INV_IH * INV_IH * Fraction(1, 2)
    # a constant generates an ordinary exponential
    c = P("3")
    ser = star_exp(c, 5)
    assert ser == TruncSeries.monomial("t", c * INV_IH, 1, 5).exp()


def test_quadratic_parameters():
    osc = QuadraticHamiltonian.oscillator(1)
    assert (osc.d, osc.delta, osc.sign) == (Fraction(1, 4), Fraction(1, 2), 1)
    dil = QuadraticHamiltonian.dilation(1)
    assert dil.poly() == P("p1*q1")
    # the mixed coefficient enters the discriminant as beta^2/4
    assert (dil.d, dil.delta, dil.sign) == (Fraction(-1, 4), Fraction(1, 2), -1)
    with pytest.raises(ValueError, match="irrational"):
        QuadraticHamiltonian(1, 1, 1).delta


@pytest.mark.parametrize("ell", [1, 2])
def test_oscillator_closed_form_through_t8(ell):
    qh = QuadraticHamiltonian.oscillator(ell)
    assert star_exp(qh.poly(), 8) == quadratic_closed_form(qh, 8)


def test_oscillator_t2_coefficient():
    qh = QuadraticHamiltonian.oscillator(1)
    c2 = quadratic_closed_form(qh, 2).coeffs[2]
    assert c2 == (P("1/4") - H * H * Poly.hbar(S1, -2)) * Fraction(1, 2)


def test_dilation_closed_form():
    qh = QuadraticHamiltonian.dilation(1)
    assert star_exp(qh.poly(), 8) == quadratic_closed_form(qh, 8)


def test_parabolic_branch():
    qh = QuadraticHamiltonian(1, 0, 0)
    assert qh.sign == 0
    assert quadratic_closed_form(qh, 6) == TruncSeries.monomial("t", P("p1^2") * INV_IH, 1, 6).exp()
    assert star_exp(P("p1^2"), 6) == quadratic_closed_form(qh, 6)


@pytest.mark.parametrize("abg", [(1, 2, 2), (1, 2, 1), (0, 3, -1), (2, 0, -2), (1, -2, 5)])
def test_other_quadratics(abg):
    qh = QuadraticHamiltonian(*abg)
    assert star_exp(qh.poly(), 6) == quadratic_closed_form(qh, 6)


class _UnreducedDilation(QuadraticHamiltonian):
    """pq with delta taken from alpha*gamma - beta^2 = -1, i.e. delta = 1."""

    @property
    def delta(self):
        return Fraction(1)


def test_closed_form_with_unreduced_discriminant_disagrees():
    wrong = _UnreducedDilation(0, 1, 0)
    assert wrong.sign == -1 and wrong.delta == 1
    assert star_exp(P("p1*q1"), 4) != quadratic_closed_form(wrong, 4)
    assert star_exp(P("p1*q1"), 4) == quadratic_closed_form(QuadraticHamiltonian(0, 1, 0), 4)


def test_casimir():
    assert casimir(2) == P("(p1^2+p2^2)*(q1^2+q2^2) - (p1*q1+p2*q2)^2 - hbar^2/2", ell=2)
    for ell in (2, 3):
        C = casimir(ell)
        for i in range(1, ell + 1):
            for j in range(i + 1, ell + 1):
                assert not moyal_bracket(C, angular_momentum(ell, i, j))
    with pytest.raises(ValueError):
        casimir(1)


def test_casimir_star_constant():
    assert casimir_star_constant(2) == Scalar(Fraction(-1, 2))
    assert casimir_star_constant(3) == Scalar(Fraction(-3, 2))
    for ell in (2, 3, 4):
        # -l(l-1)/4 hbar^2, so the star square reproduces C exactly
        assert casimir_star_constant(ell) == Scalar(Fraction(-ell * (ell - 1), 4))
        S = phase_space(ell)
        acc = Poly.zero(S)
        for i in range(1, ell + 1):
            for j in range(i + 1, ell + 1):
                L = angular_momentum(ell, i, j)
                acc = acc + moyal(L, L)
        assert acc == casimir(ell)


def test_bch_examples():
    p, q = P("p1"), P("q1")
    assert bch_group_law(p, q, 2).is_zero()
    Z = bch_series(p, q, 2)
    assert Z.coeffs[(1, 1)] == moyal_bracket(p, q) * Fraction(1, 2)
    assert bch_group_law(p, P("0"), 3).is_zero()
    assert bch_group_law(H, H, 4).is_zero()
    with pytest.raises(ValueError):
        bch_group_law(P("p1^3"), q, 2)


@pytest.mark.parametrize("u,v,K", [("p1", "q1", 7), ("p1^2", "q1^2", 4), ("p1^2+q1", "p1*q1", 4)])
def test_bch_against_log(u, v, K):
    u, v = P(u), P(v)
    assert bch_group_law(u, v, K).is_zero()
    assert bch_series(u, v, K) == bch_via_log(u, v, K)


def test_bch_rejects_high_order_nonterminating():
    with pytest.raises(ValueError):
        bch_series(P("p1^2"), P("q1^2"), 5)


def test_weyl_examples():
    Q, Pm = WeylElem.Q(1, 1), WeylElem.P(1, 1)
    ih = WeylElem.identity(1).scale(I)
    h = WeylElem(1, {(0, 0, 1): 1})
    assert weyl_quantize(P("1")) == WeylElem.identity(1)
    assert weyl_quantize(P("p1*q1")) == Q * Pm - weyl_mul(ih, h).scale(Fraction(1, 2))
    assert weyl_quantize(P("q1")) * weyl_quantize(P("p1")) == Q * Pm
    assert weyl_quantize(moyal(P("q1"), P("p1"))) == Q * Pm
    # [Q, P] = i hbar
    assert Pm * Q == Q * Pm - weyl_mul(ih, h)


@settings(max_examples=40, deadline=None)
@given(polys(phase_space(2), max_degree=3, hbar=True), polys(phase_space(2), max_degree=3, hbar=True))
def test_weyl_homomorphism_random(u, v):
    assert weyl_quantize(moyal(u, v)) == weyl_mul(weyl_quantize(u), weyl_quantize(v))


@settings(max_examples=30, deadline=None)
@given(polys(phase_space(2), max_degree=2), polys(phase_space(2), max_degree=4))
def test_quadratic_evolution_is_classical(h, u):
    assert moyal_bracket(h, u) == poisson(h, u)


def test_bi_series_algebra():
    one = BiSeries(S1, 2, {(0, 0): P("1")})
    x = BiSeries(S1, 2, {(1, 0): P("q1"), (0, 1): P("p1")})
    assert one.star(x) == x
    assert (x - x).is_zero()
