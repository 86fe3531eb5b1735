"""Schouten self-bracket of polynomial bivectors and formal Poisson series."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

from ..symcore import DimensionError, Poly, Space

__all__ = ["Trivector", "schouten_pair", "schouten_self", "jacobi_trivector", "poisson_series_check"]


def _sort_sign(idx: tuple[int, int, int]) -> tuple[int, tuple[int, int, int]]:
    a = list(idx)
    sign = 1
    for i in range(3):
        for j in range(2 - i):
            if a[j] > a[j + 1]:
                a[j], a[j + 1] = a[j + 1], a[j]
                sign = -sign
    return sign, tuple(a)


@dataclass(frozen=True, eq=False)
class Trivector:
    space: Space
    components: Mapping[tuple[int, int, int], Poly] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for idx, c in dict(self.components).items():
            if len(set(idx)) < 3:
                if c:
                    raise ValueError("a skew trivector has no repeated-index components")
                continue
            sign, key = _sort_sign(tuple(idx))
            c = c if sign > 0 else -c
            if key in clean:
                c = clean[key] + c
            if c:
                clean[key] = c
            else:
                clean.pop(key, None)
        object.__setattr__(self, "components", clean)

    def entry(self, i: int, j: int, k: int) -> Poly:
        if len({i, j, k}) < 3:
            return Poly.zero(self.space)
        sign, key = _sort_sign((i, j, k))
        c = self.components.get(key, Poly.zero(self.space))
        return c if sign > 0 else -c

    def is_zero(self) -> bool:
        return not self.components

    def __bool__(self) -> bool:
        return bool(self.components)

    def __add__(self, other: "Trivector") -> "Trivector":
        comps = dict(self.components)
        for k, c in other.components.items():
            comps[k] = comps[k] + c if k in comps else c
        return Trivector(self.space, comps)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trivector):
            return NotImplemented
        return self.space == other.space and self.components == other.components

    def __hash__(self):
        return hash((self.space, frozenset(self.components.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {v}" for k, v in sorted(self.components.items()))
        return f"Trivector({body or '0'})"


def schouten_pair(A, B) -> Trivector:
    """T^{ijk} = sum over cyclic (i,j,k) of sum_l A^{il} d_l B^{jk}.

    Symmetrized over (A, B) this is the Schouten bracket up to normalization;
    with A = B it is the Jacobiator of the bracket induced by A.
    """
    if A.space != B.space:
        raise DimensionError("bivectors on different spaces")
    space = A.space
    d = space.nvars
    comps = {}
    for i, j, k in combinations(range(d), 3):
        acc = Poly.zero(space)
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            for l in range(d):
                x = A.entry(a, l)
                if x:
                    y = B.entry(b, c).derive(l)
                    if y:
                        acc = acc + x * y
        if acc:
            comps[(i, j, k)] = acc
    return Trivector(space, comps)


def schouten_self(L) -> Trivector:
    if L.space.nvars < 2:
        raise DimensionError("bivectors need dimension >= 2")
    return schouten_pair(L, L)


def jacobi_trivector(L) -> Trivector:
    """Independent route: {x_i,{x_j,x_k}} + cyclic, using the tensor's bracket."""
    space = L.space
    xs = [Poly.var(space, i) for i in range(space.nvars)]
    comps = {}
    for i, j, k in combinations(range(space.nvars), 3):
        acc = (L.bracket(xs[i], L.bracket(xs[j], xs[k]))
               + L.bracket(xs[j], L.bracket(xs[k], xs[i]))
               + L.bracket(xs[k], L.bracket(xs[i], xs[j])))
        if acc:
            comps[(i, j, k)] = acc
    return Trivector(space, comps)


def poisson_series_check(Ls: Sequence) -> list[Trivector]:
    """Residuals of [L(h), L(h)] for L(h) = sum_a h^a Ls[a], one Trivector per order 0..2(K-1)."""
    Ls = list(Ls)
    if not Ls:
        return []
    space = Ls[0].space
    for L in Ls:
        if L.space != space:
            raise DimensionError("series terms on different spaces")
    K = len(Ls)
    out = []
    for m in range(2 * K - 1):
        acc = Trivector(space, {})
        for a in range(max(0, m - K + 1), min(m, K - 1) + 1):
            acc = acc + schouten_pair(Ls[a], Ls[m - a])
        out.append(acc)
    return out
