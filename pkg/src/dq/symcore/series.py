"""Truncated formal power series in one formal variable with Poly coefficients."""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Callable, Sequence

from .poly import DimensionError, Poly, Space
from .scalar import as_scalar

__all__ = ["TruncSeries", "series_arith", "SeriesError"]

FORMAL_VARS = ("t", "s", "beta")


class SeriesError(ValueError):
    pass


class TruncSeries:
    """a_0 + a_1 x + ... + a_K x^K, arithmetic exact modulo x^(K+1).

    Coefficients multiply with ``Poly.__mul__`` unless a different product is
    passed explicitly (the star exponential uses the Moyal product).
    """

    __slots__ = ("var", "order", "coeffs", "space")

    def __init__(self, var: str, coeffs: Sequence[Poly], order: int | None = None, space: Space | None = None):
        if var not in FORMAL_VARS:
            raise SeriesError(f"formal variable must be one of {FORMAL_VARS}, got {var!r}")
        coeffs = list(coeffs)
        if space is None:
            if not coeffs:
                raise SeriesError("empty series needs an explicit space")
            space = coeffs[0].space
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise SeriesError("order must be non-negative")
        coeffs = coeffs[: order + 1]
        coeffs += [Poly.zero(space)] * (order + 1 - len(coeffs))
        for c in coeffs:
            if c.space != space:
                raise DimensionError("series coefficients live on different spaces")
        self.var = var
        self.order = order
        self.coeffs = tuple(coeffs)
        self.space = space

    @classmethod
    def from_scalars(cls, var: str, values, space: Space, order: int | None = None) -> "TruncSeries":
        return cls(var, [Poly.const(space, v) for v in values], order=order, space=space)

    @classmethod
    def monomial(cls, var: str, coeff: Poly, power: int, order: int) -> "TruncSeries":
        cs = [Poly.zero(coeff.space)] * (order + 1)
        if power <= order:
            cs[power] = coeff
        return cls(var, cs, order=order, space=coeff.space)

    def __getitem__(self, n: int) -> Poly:
        return self.coeffs[n]

    def __len__(self) -> int:
        return self.order + 1

    def _check(self, other: "TruncSeries") -> None:
        if self.var != other.var or self.order != other.order:
            raise SeriesError(
                f"series mismatch: {self.var}/K={self.order} vs {other.var}/K={other.order}"
            )
        if self.space != other.space:
            raise DimensionError("series coefficients live on different spaces")

    def truncate(self, order: int) -> "TruncSeries":
        return TruncSeries(self.var, self.coeffs, order=min(order, self.order), space=self.space)

    def extend(self, order: int) -> "TruncSeries":
        """Pad with zeros (only meaningful for polynomials in the formal variable)."""
        return TruncSeries(self.var, self.coeffs, order=order, space=self.space)

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        return TruncSeries(self.var, [a + b for a, b in zip(self.coeffs, other.coeffs)], space=self.space)

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        return TruncSeries(self.var, [a - b for a, b in zip(self.coeffs, other.coeffs)], space=self.space)

    def __neg__(self) -> "TruncSeries":
        return TruncSeries(self.var, [-a for a in self.coeffs], space=self.space)

    def scale(self, c) -> "TruncSeries":
        """Multiply every coefficient by a scalar or Poly."""
        return TruncSeries(self.var, [a * c for a in self.coeffs], space=self.space)

    def mul(self, other: "TruncSeries", product: Callable[[Poly, Poly], Poly] | None = None) -> "TruncSeries":
        self._check(other)
        prod = product or (lambda a, b: a * b)
        K = self.order
        out = []
        for n in range(K + 1):
            acc = Poly.zero(self.space)
            for k in range(n + 1):
                a, b = self.coeffs[k], other.coeffs[n - k]
                if a and b:
                    acc = acc + prod(a, b)
            out.append(acc)
        return TruncSeries(self.var, out, space=self.space)

    __mul__ = mul

    def rescale_var(self, c) -> "TruncSeries":
        """Substitute x -> c*x for an exact scalar c."""
        c = as_scalar(c)
        out, f = [], as_scalar(1)
        for a in self.coeffs:
            out.append(a * f)
            f = f * c
        return TruncSeries(self.var, out, space=self.space)

    def inverse(self) -> "TruncSeries":
        """Multiplicative inverse; the constant term must be a nonzero scalar."""
        a0 = self.coeffs[0]
        if not a0.is_constant() or a0.is_zero() or len(a0.terms) != 1 or a0.hbar_min() != 0 or a0.hbar_degree() != 0:
            raise SeriesError("inverse needs a nonzero scalar constant term")
        inv0 = a0.constant_value().inverse()
        out = [Poly.const(self.space, inv0)]
        for n in range(1, self.order + 1):
            acc = Poly.zero(self.space)
            for k in range(1, n + 1):
                acc = acc + self.coeffs[k] * out[n - k]
            out.append(acc * (-inv0))
        return TruncSeries(self.var, out, space=self.space)

    def compose(self, inner: "TruncSeries") -> "TruncSeries":
        """self(inner(x)); inner must have zero constant term."""
        self._check(inner)
        if inner.coeffs[0]:
            raise SeriesError("compose argument must have zero constant term")
        acc = TruncSeries(self.var, [self.coeffs[-1]], order=self.order, space=self.space)
        for a in reversed(self.coeffs[:-1]):
            acc = acc * inner
            acc = TruncSeries(self.var, [acc.coeffs[0] + a] + list(acc.coeffs[1:]), space=self.space)
        return acc

    def exp(self) -> "TruncSeries":
        """exp(self) via n E_n = sum_k k A_k E_{n-k}; needs a zero constant term."""
        if self.coeffs[0]:
            raise SeriesError(
                "exp needs a zero constant term (exp of a nonzero constant is not exact)"
            )
        out = [Poly.const(self.space, 1)]
        for n in range(1, self.order + 1):
            acc = Poly.zero(self.space)
            for k in range(1, n + 1):
                if self.coeffs[k]:
                    acc = acc + self.coeffs[k] * out[n - k] * k
            out.append(acc * Fraction(1, n))
        return TruncSeries(self.var, out, space=self.space)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (self.var, self.order, self.coeffs) == (other.var, other.order, other.coeffs)

    def __hash__(self):
        return hash((self.var, self.order, self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __repr__(self) -> str:
        body = " + ".join(f"({c})*{self.var}^{n}" for n, c in enumerate(self.coeffs) if c) or "0"
        return f"TruncSeries[{self.var}, K={self.order}]({body})"


def series_arith(op: str, a: TruncSeries, b: TruncSeries | None = None) -> TruncSeries:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "compose":
        return a.compose(b)
    if op == "exp":
        if b is not None:
            raise SeriesError("exp is unary")
        return a.exp()
    raise SeriesError(f"unknown series op {op!r}")


# exact Taylor coefficients of a few elementary functions of c*x
def exp_coeffs(K: int) -> list[Fraction]:
    return [Fraction(1, factorial(n)) for n in range(K + 1)]


def cos_coeffs(K: int) -> list[Fraction]:
    return [Fraction((-1) ** (n // 2), factorial(n)) if n % 2 == 0 else Fraction(0) for n in range(K + 1)]


def sin_coeffs(K: int) -> list[Fraction]:
    return [Fraction((-1) ** (n // 2), factorial(n)) if n % 2 == 1 else Fraction(0) for n in range(K + 1)]


def cosh_coeffs(K: int) -> list[Fraction]:
    return [Fraction(1, factorial(n)) if n % 2 == 0 else Fraction(0) for n in range(K + 1)]


def sinh_coeffs(K: int) -> list[Fraction]:
    return [Fraction(1, factorial(n)) if n % 2 == 1 else Fraction(0) for n in range(K + 1)]
