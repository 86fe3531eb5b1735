"""Multidifferential cochains with polynomial coefficients.

A k-cochain is stored as ``{(a_1, ..., a_k): c}`` meaning
``C(u_1..u_k) = sum c * d^{a_1} u_1 * ... * d^{a_k} u_k`` where each ``a_i``
is a multi-index over the coordinates of the space.  Because the
representation is normalized (merged keys, no zero coefficients), two
operators are equal as maps on polynomials iff their term dicts are equal.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial
from typing import Iterable, Mapping, Sequence

from ..symcore import DimensionError, Poly, Space, as_scalar

__all__ = ["MultiDiffOp", "ArityError"]

Index = tuple[int, ...]


class ArityError(ValueError):
    pass


@lru_cache(maxsize=None)
def _compositions(n: int, parts: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    """All ways to write n as an ordered sum of `parts` non-negative ints, with multinomial weight."""
    if parts == 1:
        return (((n,), 1),)
    out = []
    for first in range(n + 1):
        for rest, _ in _compositions(n - first, parts - 1):
            comp = (first,) + rest
            w = factorial(n)
            for c in comp:
                w //= factorial(c)
            out.append((comp, w))
    return tuple(out)


def _leibniz(alpha: Index, parts: int):
    """Split the multi-index alpha across `parts` factors: yields (indices, weight)."""
    per_coord = [_compositions(a, parts) for a in alpha]
    for choice in product(*per_coord):
        weight = 1
        for _, w in choice:
            weight *= w
        yield tuple(tuple(ch[0][j] for ch in choice) for j in range(parts)), weight


def _add_index(a: Index, b: Index) -> Index:
    return tuple(x + y for x, y in zip(a, b))


class MultiDiffOp:
    """Immutable k-linear multidifferential operator on polynomials of one space."""

    __slots__ = ("space", "arity", "terms")

    def __init__(self, space: Space, arity: int, terms: Mapping[tuple[Index, ...], Poly] | None = None):
        if arity < 0:
            raise ArityError("arity must be non-negative")
        self.space = space
        self.arity = arity
        clean: dict[tuple[Index, ...], Poly] = {}
        for key, c in (terms or {}).items():
            if len(key) != arity or any(len(a) != space.nvars for a in key):
                raise ArityError(f"index tuple {key} does not fit arity {arity} on {space}")
            if not isinstance(c, Poly):
                c = Poly.const(space, c)
            elif c.space != space:
                raise DimensionError("coefficient lives on another space")
            key = tuple(tuple(a) for a in key)
            if key in clean:
                c = clean[key] + c
            if c:
                clean[key] = c
            else:
                clean.pop(key, None)
        self.terms = clean

    # ---------- constructors ----------
    @classmethod
    def zero(cls, space: Space, arity: int) -> "MultiDiffOp":
        return cls(space, arity)

    @classmethod
    def identity(cls, space: Space) -> "MultiDiffOp":
        z = (0,) * space.nvars
        return cls(space, 1, {(z,): Poly.const(space, 1)})

    @classmethod
    def multiplication(cls, space: Space) -> "MultiDiffOp":
        z = (0,) * space.nvars
        return cls(space, 2, {(z, z): Poly.const(space, 1)})

    @classmethod
    def derivative(cls, space: Space, alpha: Index, coeff: Poly | None = None) -> "MultiDiffOp":
        c = coeff if coeff is not None else Poly.const(space, 1)
        return cls(space, 1, {(tuple(alpha),): c})

    # ---------- evaluation ----------
    def __call__(self, *args: Poly) -> Poly:
        return self.apply(args)

    def apply(self, args: Sequence[Poly]) -> Poly:
        if len(args) != self.arity:
            raise ArityError(f"cochain of arity {self.arity} applied to {len(args)} arguments")
        for a in args:
            if a.space != self.space:
                raise DimensionError(f"argument on {a.space}, cochain on {self.space}")
        cache: list[dict[Index, Poly]] = [{} for _ in args]
        out = Poly.zero(self.space)
        for key, c in self.terms.items():
            acc = c
            for slot, alpha in enumerate(key):
                d = cache[slot].get(alpha)
                if d is None:
                    d = args[slot].derive_multi(alpha)
                    cache[slot][alpha] = d
                if not d:
                    acc = None
                    break
                acc = acc * d
            if acc is not None:
                out = out + acc
        return out

    # ---------- linear structure ----------
    def _check(self, other: "MultiDiffOp") -> None:
        if self.space != other.space or self.arity != other.arity:
            raise ArityError("cochains differ in space or arity")

    def __add__(self, other: "MultiDiffOp") -> "MultiDiffOp":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return MultiDiffOp(self.space, self.arity, out)

    def __neg__(self) -> "MultiDiffOp":
        return MultiDiffOp(self.space, self.arity, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "MultiDiffOp") -> "MultiDiffOp":
        return self + (-other)

    def scale(self, factor) -> "MultiDiffOp":
        """Multiply by a scalar or by a Poly (acting on the coefficients)."""
        if not isinstance(factor, Poly):
            factor = as_scalar(factor)
        return MultiDiffOp(self.space, self.arity, {k: c * factor for k, c in self.terms.items()})

    __mul__ = scale
    __rmul__ = scale

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiDiffOp):
            return NotImplemented
        return self.space == other.space and self.arity == other.arity and self.terms == other.terms

    def __hash__(self):
        return hash((self.space, self.arity, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def max_order(self) -> int:
        """Largest total derivative order over all slots of one term."""
        return max((sum(sum(a) for a in key) for key in self.terms), default=0)

    def slot_orders(self) -> tuple[int, ...]:
        return tuple(max((sum(key[i]) for key in self.terms), default=0) for i in range(self.arity))

    def coefficient_degree(self) -> int:
        return max((c.degree() for c in self.terms.values()), default=-1)

    # ---------- structural operations ----------
    def reindex(self, order: Sequence[int]) -> "MultiDiffOp":
        """Return D with D(w_0..w_{k-1}) = C(w_{order[0]}, ..., w_{order[k-1]})."""
        order = list(order)
        if sorted(order) != list(range(self.arity)):
            raise ArityError(f"{order} is not a permutation of {self.arity} slots")
        out: dict[tuple[Index, ...], Poly] = {}
        z = (0,) * self.space.nvars
        for key, c in self.terms.items():
            new = [z] * self.arity
            for slot, src in enumerate(order):
                new[src] = key[slot]
            out[tuple(new)] = c
        return MultiDiffOp(self.space, self.arity, out)

    def substitute(self, slot: int, inner: "MultiDiffOp") -> "MultiDiffOp":
        """C(u_0, .., inner(v_0..v_{m-1}), .., u_{k-1}) as an operator of arity k+m-1."""
        if not 0 <= slot < self.arity:
            raise ArityError(f"slot {slot} out of range for arity {self.arity}")
        if inner.space != self.space:
            raise DimensionError("cochains live on different spaces")
        m = inner.arity
        out: dict[tuple[Index, ...], Poly] = {}
        for key, c in self.terms.items():
            alpha = key[slot]
            head, tail = key[:slot], key[slot + 1:]
            for ikey, d in inner.terms.items():
                for split, w in _leibniz(alpha, m + 1):
                    dc = d.derive_multi(split[0])
                    if not dc:
                        continue
                    mid = tuple(_add_index(ikey[j], split[j + 1]) for j in range(m))
                    nk = head + mid + tail
                    val = c * dc * w
                    out[nk] = out[nk] + val if nk in out else val
        return MultiDiffOp(self.space, self.arity + m - 1, out)

    def compose_after(self, outer: "MultiDiffOp") -> "MultiDiffOp":
        """outer(self(...)) for a 1-cochain `outer`."""
        if outer.arity != 1:
            raise ArityError("outer operator must be a 1-cochain")
        return outer.substitute(0, self)

    def is_skew(self) -> bool:
        """Skew-symmetric under every adjacent transposition of slots."""
        for i in range(self.arity - 1):
            perm = list(range(self.arity))
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
            if self.reindex(perm) != -self:
                return False
        return True

    def is_symmetric(self) -> bool:
        for i in range(self.arity - 1):
            perm = list(range(self.arity))
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
            if self.reindex(perm) != self:
                return False
        return True

    def skew_part(self) -> "MultiDiffOp":
        if self.arity != 2:
            raise ArityError("skew_part is defined for 2-cochains")
        return (self - self.reindex([1, 0])).scale(Fraction(1, 2))

    def sym_part(self) -> "MultiDiffOp":
        if self.arity != 2:
            raise ArityError("sym_part is defined for 2-cochains")
        return (self + self.reindex([1, 0])).scale(Fraction(1, 2))

    def __repr__(self) -> str:
        names = self.space.names
        parts = []
        for key, c in sorted(self.terms.items()):
            slots = []
            for i, a in enumerate(key):
                d = "".join(f"d{names[j]}" + (f"^{e}" if e > 1 else "") for j, e in enumerate(a) if e)
                slots.append(f"{d}[u{i}]" if d else f"u{i}")
            parts.append(f"({c})*" + "*".join(slots))
        return f"MultiDiffOp[{self.arity}]({' + '.join(parts) or '0'})"


def unit_index(space: Space, i: int) -> Index:
    a = [0] * space.nvars
    a[i] = 1
    return tuple(a)


def monomial_probes(space: Space, max_degree: int) -> list[Poly]:
    """All monic monomials (no hbar) of total degree <= max_degree."""
    out = []

    def rec(prefix, remaining, left):
        if left == 0:
            out.append(Poly.monomial(space, prefix))
            return
        for e in range(remaining + 1):
            rec(prefix + [e], remaining - e, left - 1)

    rec([], max_degree, space.nvars)
    return out


def probe_tuples(space: Space, arity: int, max_degree: int) -> Iterable[tuple[Poly, ...]]:
    probes = monomial_probes(space, max_degree)
    return product(probes, repeat=arity)
