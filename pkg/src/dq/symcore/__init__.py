"""Exact arithmetic kernel: Gaussian rationals, Laurent-in-hbar polynomials, truncated series."""

from .poly import DimensionError, Poly, Space, coord_space, phase_space, to_text
from .scalar import I, ONE, ZERO, Scalar, as_scalar
from .series import SeriesError, TruncSeries, series_arith

__all__ = [
    "DimensionError", "Poly", "Space", "coord_space", "phase_space", "to_text",
    "I", "ONE", "ZERO", "Scalar", "as_scalar",
    "SeriesError", "TruncSeries", "series_arith",
    "poly_arith", "derive", "eval_numeric",
]


def poly_arith(op: str, u: Poly, v: Poly | None = None) -> Poly:
    if op == "neg":
        return -u
    if v is None:
        raise ValueError(f"{op} needs two operands")
    if u.space != v.space:
        raise DimensionError(f"cannot combine {u.space} with {v.space}")
    if op == "add":
        return u + v
    if op == "sub":
        return u - v
    if op == "mul":
        return u * v
    raise ValueError(f"unknown poly op {op!r}")


def derive(u: Poly, var: str | int) -> Poly:
    return u.derive(var)


def eval_numeric(u: Poly, point, hbar: float) -> complex:
    if hbar <= 0 and u.hbar_min() < 0:
        raise ValueError("negative hbar power needs hbar > 0")
    return complex(u.eval_numeric(point, hbar))
