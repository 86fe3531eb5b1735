"""Shared builders and hypothesis strategies."""

import random

from hypothesis import strategies as st

from dq.shell.parser import parse
from dq.symcore import Poly, Scalar, coord_space, phase_space


def P(text, ell=1):
    return parse(text, phase_space(ell))


def X(text, n=3):
    return parse(text, coord_space(n))


def random_poly(space, rng: random.Random, terms=3, degree=6, lo=-9, hi=9):
    # distinct exponents, so every coefficient stays inside [lo, hi]
    seen = {}
    for _ in range(rng.randint(1, terms)):
        exps = [0] * space.nvars
        for _ in range(rng.randint(0, degree)):
            exps[rng.randrange(space.nvars)] += 1
        seen.setdefault(tuple(exps), rng.randint(lo, hi) or 1)
    out = Poly.zero(space)
    for exps, c in seen.items():
        out = out + Poly.monomial(space, list(exps), 0, c)
    return out


def random_corpus(n, seed=2024, max_ell=3, degree=6, terms=3):
    """n triples (u, v, w) on phase spaces of dimension <= 2 * max_ell."""
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        S = phase_space(rng.randint(1, max_ell))
        out.append(tuple(random_poly(S, rng, terms, degree) for _ in range(3)))
    return out


@st.composite
def polys(draw, space, max_terms=3, max_degree=4, hbar=False):
    out = Poly.zero(space)
    for _ in range(draw(st.integers(1, max_terms))):
        exps = draw(st.lists(st.integers(0, max_degree), min_size=space.nvars, max_size=space.nvars))
        while sum(exps) > max_degree:
            i = exps.index(max(exps))
            exps[i] -= 1
        h = draw(st.integers(0, 2)) if hbar else 0
        re = draw(st.integers(-9, 9))
        im = draw(st.integers(-3, 3)) if hbar else 0
        out = out + Poly.monomial(space, exps, h, Scalar(re, im))
    return out
