"""Sparse multivariate polynomials with a Laurent deformation variable hbar.

A :class:`Poly` lives on a :class:`Space`: either a phase space with ``ell``
conjugate pairs (coordinates ordered ``p1..pl, q1..ql``) or a plain coordinate
space ``x1..xn``.  Exponent keys are tuples of length ``nvars + 1``; the last
slot is the (possibly negative) exponent of hbar.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .scalar import ONE, Scalar, as_scalar, format_scalar

__all__ = ["Space", "Poly", "DimensionError", "phase_space", "coord_space"]


class DimensionError(ValueError):
    """Operands live on different spaces."""


@dataclass(frozen=True)
class Space:
    kind: str  # "pq" or "x"
    n: int     # ell for phase space, coordinate count otherwise

    def __post_init__(self):
        if self.kind not in ("pq", "x"):
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.n < 0:
            raise ValueError("space dimension must be non-negative")

    @property
    def nvars(self) -> int:
        return 2 * self.n if self.kind == "pq" else self.n

    @property
    def ell(self) -> int:
        if self.kind != "pq":
            raise AttributeError("coordinate spaces have no ell")
        return self.n

    @cached_property
    def names(self) -> tuple[str, ...]:
        if self.kind == "pq":
            return tuple(f"p{i}" for i in range(1, self.n + 1)) + tuple(
                f"q{i}" for i in range(1, self.n + 1)
            )
        return tuple(f"x{i}" for i in range(1, self.n + 1))

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r} for {self}") from None

    def p(self, i: int) -> int:
        """Slot of p_i (1-based)."""
        return i - 1

    def q(self, i: int) -> int:
        """Slot of q_i (1-based)."""
        return self.n + i - 1

    @cached_property
    def print_order(self) -> tuple[int, ...]:
        # q factors are written before p factors: "q1*p1"
        if self.kind == "pq":
            return tuple(range(self.n, 2 * self.n)) + tuple(range(self.n))
        return tuple(range(self.n))

    def __str__(self) -> str:
        return f"phase space ell={self.n}" if self.kind == "pq" else f"R^{self.n}"


def phase_space(ell: int) -> Space:
    return Space("pq", ell)


def coord_space(n: int) -> Space:
    return Space("x", n)


def _order_key(key: tuple[int, ...]) -> tuple:
    return (sum(key), key)


class Poly:
    """Immutable sparse polynomial; zero coefficients are never stored."""

    __slots__ = ("space", "terms", "_hash")

    def __init__(self, space: Space, terms: Mapping[tuple[int, ...], Scalar] | None = None):
        self.space = space
        clean: dict[tuple[int, ...], Scalar] = {}
        width = space.nvars + 1
        for k, c in (terms or {}).items():
            if len(k) != width:
                raise DimensionError(f"exponent key {k} does not match {space}")
            if any(e < 0 for e in k[:-1]):
                raise ValueError(f"negative exponent on a coordinate in {k}")
            c = as_scalar(c)
            if c:
                clean[tuple(k)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _wrap(cls, space: Space, terms: dict) -> "Poly":
        # terms already normalized
        p = object.__new__(cls)
        p.space = space
        p.terms = terms
        p._hash = None
        return p

    # ---------- constructors ----------
    @classmethod
    def zero(cls, space: Space) -> "Poly":
        return cls._wrap(space, {})

    @classmethod
    def const(cls, space: Space, c=1) -> "Poly":
        c = as_scalar(c)
        return cls._wrap(space, {(0,) * (space.nvars + 1): c} if c else {})

    @classmethod
    def var(cls, space: Space, name: str | int) -> "Poly":
        idx = space.index(name) if isinstance(name, str) else name
        key = [0] * (space.nvars + 1)
        key[idx] = 1
        return cls._wrap(space, {tuple(key): ONE})

    @classmethod
    def hbar(cls, space: Space, power: int = 1) -> "Poly":
        key = (0,) * space.nvars + (power,)
        return cls._wrap(space, {key: ONE})

    @classmethod
    def monomial(cls, space: Space, exps: Iterable[int], hbar: int = 0, coeff=1) -> "Poly":
        return cls(space, {tuple(exps) + (hbar,): coeff})

    # ---------- inspection ----------
    @property
    def ell(self) -> int:
        return self.space.ell

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        """No coordinate dependence (hbar allowed)."""
        return all(not any(k[:-1]) for k in self.terms)

    def constant_value(self) -> Scalar:
        """Coefficient of the bare monomial 1."""
        return self.terms.get((0,) * (self.space.nvars + 1), Scalar(0))

    def degree(self) -> int:
        """Total degree in the coordinates (hbar ignored); -1 for zero."""
        return max((sum(k[:-1]) for k in self.terms), default=-1)

    def hbar_degree(self) -> int:
        return max((k[-1] for k in self.terms), default=0)

    def hbar_min(self) -> int:
        return min((k[-1] for k in self.terms), default=0)

    def hbar_part(self, power: int) -> "Poly":
        """Coefficient of hbar**power, as an hbar-free Poly."""
        return Poly._wrap(
            self.space,
            {k[:-1] + (0,): c for k, c in self.terms.items() if k[-1] == power},
        )

    def truncate_hbar(self, max_power: int) -> "Poly":
        return Poly._wrap(self.space, {k: c for k, c in self.terms.items() if k[-1] <= max_power})

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Scalar]]:
        return sorted(self.terms.items(), key=lambda kv: _order_key(kv[0]), reverse=True)

    # ---------- ring operations ----------
    def _check(self, other: "Poly") -> None:
        if self.space != other.space:
            raise DimensionError(f"cannot combine {self.space} with {other.space}")

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.const(self.space, other)

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k)
            if s is None:
                out[k] = c
            else:
                s = s + c
                if s:
                    out[k] = s
                else:
                    del out[k]
        return Poly._wrap(self.space, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._wrap(self.space, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = as_scalar(other)
            if not c:
                return Poly.zero(self.space)
            return Poly._wrap(self.space, {k: v * c for k, v in self.terms.items()})
        self._check(other)
        out: dict[tuple[int, ...], Scalar] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = tuple([a + b for a, b in zip(k1, k2)])
                c = c1 * c2
                s = out.get(k)
                out[k] = c if s is None else s + c
        return Poly._wrap(self.space, {k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Poly":
        """Division by an exact nonzero scalar only."""
        return self * as_scalar(other).inverse()

    def __pow__(self, n: int) -> "Poly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("Poly powers must be non-negative integers")
        out = Poly.const(self.space, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.space == other.space and self.terms == other.terms
        try:
            return self == Poly.const(self.space, other)
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.space, frozenset(self.terms.items())))
        return self._hash

    # ---------- calculus ----------
    def derive(self, var: str | int, order: int = 1) -> "Poly":
        """Formal partial derivative in a coordinate (never hbar)."""
        if isinstance(var, str):
            if var == "hbar":
                raise ValueError("hbar is a formal parameter, not a coordinate")
            idx = self.space.index(var)
        else:
            idx = var
            if not 0 <= idx < self.space.nvars:
                raise ValueError(f"coordinate slot {idx} out of range for {self.space}")
        out = {}
        for k, c in self.terms.items():
            e = k[idx]
            if e < order:
                continue
            f = 1
            for j in range(order):
                f *= e - j
            nk = list(k)
            nk[idx] = e - order
            out[tuple(nk)] = c * f
        return Poly._wrap(self.space, out)

    def derive_multi(self, alpha: tuple[int, ...]) -> "Poly":
        """Apply the multi-index derivative d^alpha (alpha has nvars entries)."""
        out = {}
        for k, c in self.terms.items():
            f = 1
            nk = list(k)
            for i, a in enumerate(alpha):
                if not a:
                    continue
                e = k[i]
                if e < a:
                    f = 0
                    break
                for j in range(a):
                    f *= e - j
                nk[i] = e - a
            if f:
                out[tuple(nk)] = c * f
        return Poly._wrap(self.space, out)

    def map_coeffs(self, fn) -> "Poly":
        return Poly(self.space, {k: fn(c) for k, c in self.terms.items()})

    def conjugate(self) -> "Poly":
        return Poly._wrap(self.space, {k: c.conjugate() for k, c in self.terms.items()})

    def subs_hbar_zero(self) -> "Poly":
        """Set hbar = 0; rejects negative hbar powers."""
        if self.hbar_min() < 0:
            raise ValueError("cannot set hbar = 0 with negative hbar powers present")
        return self.hbar_part(0)

    def embed(self, space: Space, slots: Iterable[int]) -> "Poly":
        """Relabel coordinates into a larger space: coordinate i goes to slots[i]."""
        slots = list(slots)
        out = {}
        for k, c in self.terms.items():
            nk = [0] * (space.nvars + 1)
            for i, e in enumerate(k[:-1]):
                nk[slots[i]] += e
            nk[-1] = k[-1]
            out[tuple(nk)] = c
        return Poly._wrap(space, out)

    # ---------- numerics ----------
    def eval_numeric(self, point, hbar: float):
        """Substitute floats; ``point`` entries may be numpy arrays (broadcast).

        Nested Horner evaluation, one coordinate at a time.
        """
        if len(point) != self.space.nvars:
            raise DimensionError(f"point has {len(point)} entries, {self.space} needs {self.space.nvars}")
        if hbar == 0 and self.hbar_min() < 0:
            raise ValueError("negative hbar power evaluated at hbar = 0")
        if hbar < 0:
            raise ValueError("hbar must be non-negative")
        items = [(k[:-1], complex(c) * float(hbar) ** k[-1]) for k, c in self.terms.items()]
        val = _horner(items, list(point), 0)
        return val

    def __repr__(self) -> str:
        return f"Poly({self.space.kind}{self.space.n}: {self})"

    def __str__(self) -> str:
        return to_text(self)


def _horner(items, point, idx):
    if not items:
        return 0j
    if idx == len(point):
        return sum(c for _, c in items)
    groups: dict[int, list] = {}
    for k, c in items:
        groups.setdefault(k[idx], []).append((k, c))
    x = point[idx]
    top = max(groups)
    acc = 0j
    for e in range(top, -1, -1):
        acc = acc * x + _horner(groups.get(e, []), point, idx + 1)
    return acc


def _monomial_text(space: Space, key: tuple[int, ...]) -> str:
    parts = []
    for i in space.print_order:
        e = key[i]
        if e == 1:
            parts.append(space.names[i])
        elif e:
            parts.append(f"{space.names[i]}^{e}")
    h = key[-1]
    if h == 1:
        parts.append("hbar")
    elif h:
        parts.append(f"hbar^{h}")
    return "*".join(parts)


def to_text(u: Poly) -> str:
    """Canonical text: graded-lex descending, explicit rational coefficients."""
    if not u.terms:
        return "0"
    chunks: list[str] = []
    for key, c in u.sorted_terms():
        mono = _monomial_text(u.space, key)
        neg = (c.im == 0 and c.re < 0) or (c.re == 0 and c.im < 0)
        mag = -c if neg else c
        if not mono:
            body = format_scalar(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{format_scalar(mag)}*{mono}"
        if not chunks:
            chunks.append(("-" + body) if neg else body)
        else:
            chunks.append((" - " if neg else " + ") + body)
    return "".join(chunks)
