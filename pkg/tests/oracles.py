"""Independent reference computations used to cross-check the library.

None of these route through the code they are compared with: the Moyal
oracle expands the bidifferential series pair by pair, the coboundary oracles
evaluate the defining alternating sums on concrete arguments, and the grid
oracle multiplies operators in the Hermite basis.
"""

from fractions import Fraction
from itertools import combinations
from math import factorial

import numpy as np

from dq.phasegrid import hermite_wigner
from dq.symcore import I, Poly


def moyal_oracle(u: Poly, v: Poly) -> Poly:
    """sum_r (i hbar/2)^r / r! P^r(u, v), expanding P one derivative pair at a time."""
    S = u.space
    nu = Poly.const(S, I * Fraction(1, 2)) * Poly.hbar(S, 1)
    out = Poly.zero(S)
    pairs = {(u, v): Fraction(1)}
    r = 0
    weight = Poly.const(S, 1)
    while pairs:
        term = Poly.zero(S)
        for (a, b), c in pairs.items():
            term = term + a * b * c
        out = out + term * weight * Fraction(1, factorial(r))
        nxt = {}
        for (a, b), c in pairs.items():
            for i in range(1, S.ell + 1):
                p, q = S.p(i), S.q(i)
                for da, db, sign in ((a.derive(q), b.derive(p), 1), (a.derive(p), b.derive(q), -1)):
                    if da and db:
                        nxt[(da, db)] = nxt.get((da, db), 0) + sign * c
        pairs = {k: c for k, c in nxt.items() if c}
        weight = weight * nu
        r += 1
    return out


def poisson_oracle(u: Poly, v: Poly) -> Poly:
    S = u.space
    out = Poly.zero(S)
    for i in range(1, S.ell + 1):
        p, q = S.p(i), S.q(i)
        out = out + u.derive(q) * v.derive(p) - u.derive(p) * v.derive(q)
    return out


def hochschild_eval(C, args):
    """(bC)(f_0..f_k) from the alternating-sum definition, evaluated on concrete polynomials."""
    k = len(args) - 1
    out = args[0] * C(*args[1:])
    for i in range(k):
        merged = args[:i] + (args[i] * args[i + 1],) + args[i + 2:]
        out = out + C(*merged) * (-1) ** (i + 1)
    return out + C(*args[:-1]) * args[-1] * (-1) ** (k + 1)


def chevalley_eval(B, args, bracket=poisson_oracle):
    """(dB)(u_0..u_p) with the bracket acting first on the omitted argument."""
    out = Poly.zero(args[0].space)
    n = len(args)
    for i in range(n):
        rest = args[:i] + args[i + 1:]
        out = out + bracket(args[i], B(*rest)) * (-1) ** i
    for i, j in combinations(range(n), 2):
        rest = tuple(a for k, a in enumerate(args) if k not in (i, j))
        out = out + B(bracket(args[i], args[j]), *rest) * (-1) ** (i + j)
    return out


def triple_product(f: Poly, g: Poly, h: Poly) -> Poly:
    """grad f . (grad g x grad h) on R^3."""
    gf = [f.derive(i) for i in range(3)]
    gg = [g.derive(i) for i in range(3)]
    gh = [h.derive(i) for i in range(3)]
    cross = [gg[1] * gh[2] - gg[2] * gh[1], gg[2] * gh[0] - gg[0] * gh[2], gg[0] * gh[1] - gg[1] * gh[0]]
    return gf[0] * cross[0] + gf[1] * cross[1] + gf[2] * cross[2]


def hermite_symbol(A: np.ndarray, N=256, L=8.0, hbar=1.0) -> np.ndarray:
    """Weyl symbol of sum_nm A[n, m] |n><m|."""
    out = 0
    for n in range(A.shape[0]):
        for m in range(A.shape[1]):
            if A[n, m]:
                out = out + A[n, m] * hermite_wigner(n, m, N, L, hbar).values
    return out
