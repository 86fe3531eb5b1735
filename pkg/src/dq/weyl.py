"""Normal-ordered Weyl algebra with [Q_i, P_j] = i hbar delta_ij and the symmetric quantization map."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, factorial

from .symcore import I, Poly, Scalar, as_scalar

__all__ = ["WeylElem", "weyl_quantize", "weyl_mul"]


class WeylElem:
    """sum c Q^a P^b hbar^h, all Q factors to the left of all P factors.

    Keys are ``a + b + (h,)`` with ``a`` and ``b`` tuples of length ell.
    """

    __slots__ = ("ell", "terms")

    def __init__(self, ell: int, terms=None):
        self.ell = ell
        clean = {}
        for k, c in (terms or {}).items():
            c = as_scalar(c)
            if len(k) != 2 * ell + 1:
                raise ValueError(f"key {k} does not fit ell={ell}")
            if c:
                clean[tuple(k)] = clean.get(tuple(k), Scalar(0)) + c
        self.terms = {k: c for k, c in clean.items() if c}

    @classmethod
    def identity(cls, ell: int) -> "WeylElem":
        return cls(ell, {(0,) * (2 * ell + 1): 1})

    @classmethod
    def Q(cls, ell: int, i: int) -> "WeylElem":
        k = [0] * (2 * ell + 1)
        k[i - 1] = 1
        return cls(ell, {tuple(k): 1})

    @classmethod
    def P(cls, ell: int, i: int) -> "WeylElem":
        k = [0] * (2 * ell + 1)
        k[ell + i - 1] = 1
        return cls(ell, {tuple(k): 1})

    def __add__(self, other: "WeylElem") -> "WeylElem":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return WeylElem(self.ell, out)

    def __sub__(self, other: "WeylElem") -> "WeylElem":
        return self + other.scale(-1)

    def scale(self, c) -> "WeylElem":
        c = as_scalar(c)
        return WeylElem(self.ell, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other: "WeylElem") -> "WeylElem":
        return weyl_mul(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeylElem):
            return NotImplemented
        return self.ell == other.ell and self.terms == other.terms

    def __hash__(self):
        return hash((self.ell, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        parts = []
        for k, c in sorted(self.terms.items(), reverse=True):
            fac = [f"Q{i + 1}^{e}" for i, e in enumerate(k[: self.ell]) if e]
            fac += [f"P{i + 1}^{e}" for i, e in enumerate(k[self.ell: 2 * self.ell]) if e]
            if k[-1]:
                fac.append(f"hbar^{k[-1]}")
            parts.append(f"({c})" + ("*" + "*".join(fac) if fac else ""))
        return "WeylElem(" + (" + ".join(parts) or "0") + ")"


@lru_cache(maxsize=None)
def _reorder(b: int, c: int) -> tuple:
    """P^b Q^c = sum_k k! C(b,k) C(c,k) (-i hbar)^k Q^(c-k) P^(b-k): tuples (c-k, b-k, k, coeff)."""
    out = []
    for k in range(min(b, c) + 1):
        w = factorial(k) * comb(b, k) * comb(c, k)
        out.append((c - k, b - k, k, (-I) ** k * w))
    return tuple(out)


def weyl_mul(A: WeylElem, B: WeylElem) -> WeylElem:
    if A.ell != B.ell:
        raise ValueError("Weyl elements with different ell")
    ell = A.ell
    out: dict = {}
    for ka, ca in A.terms.items():
        for kb, cb in B.terms.items():
            partial = [((), (), ka[-1] + kb[-1], ca * cb)]
            for i in range(ell):
                a, b = ka[i], ka[ell + i]
                c, d = kb[i], kb[ell + i]
                nxt = []
                for qs, ps, h, coef in partial:
                    for qe, pe, k, w in _reorder(b, c):
                        nxt.append((qs + (a + qe,), ps + (pe + d,), h + k, coef * w))
                partial = nxt
            for qs, ps, h, coef in partial:
                key = qs + ps + (h,)
                out[key] = out[key] + coef if key in out else coef
    return WeylElem(ell, out)


@lru_cache(maxsize=None)
def _symmetrized_1d(a: int, b: int) -> tuple:
    """Average over all words with a letters P and b letters Q, normal-ordered (ell = 1)."""
    n = a + b
    total = comb(n, a)
    P1, Q1 = WeylElem.P(1, 1), WeylElem.Q(1, 1)
    acc = WeylElem(1)
    for ppos in combinations(range(n), a):
        word = WeylElem.identity(1)
        pset = set(ppos)
        for j in range(n):
            word = weyl_mul(word, P1 if j in pset else Q1)
        acc = acc + word
    acc = acc.scale(Fraction(1, total))
    return tuple(sorted(acc.terms.items()))


def weyl_quantize(u: Poly) -> WeylElem:
    """Full symmetrization of each monomial, then normal ordering.

    Letters with different indices commute, so the symmetrization factorizes
    over degrees of freedom.
    """
    if u.space.kind != "pq":
        raise ValueError("Weyl quantization needs a phase space")
    ell = u.space.ell
    out = WeylElem(ell)
    for key, c in u.terms.items():
        partial = [((), (), key[-1], c)]
        for i in range(ell):
            a, b = key[i], key[ell + i]  # p exponent, q exponent
            nxt = []
            for qs, ps, h, coef in partial:
                for k1, w in _symmetrized_1d(a, b):
                    nxt.append((qs + (k1[0],), ps + (k1[1],), h + k1[2], coef * w))
            partial = nxt
        acc = {}
        for qs, ps, h, coef in partial:
            k = qs + ps + (h,)
            acc[k] = acc[k] + coef if k in acc else coef
        out = out + WeylElem(ell, acc)
    return out
