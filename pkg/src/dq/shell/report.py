"""Versioned JSON reports with explicit checks."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

SCHEMA = 1


@dataclass
class Check:
    name: str
    passed: bool
    residual_norm: float
    tolerance: float = 0.0
    exact_zero: bool | None = None

    def as_dict(self) -> dict:
        d = {
            "name": self.name,
            "passed": bool(self.passed),
            "residual_norm": _num(self.residual_norm),
            "tolerance": _num(self.tolerance),
        }
        if self.exact_zero is not None:
            d["exact_zero"] = bool(self.exact_zero)
        return d


def _num(x: float):
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return str(x)
    return x


def exact_norm(residual) -> float:
    """Euclidean norm of all coefficients in an exact residual (0 for zero).

    Accepts Poly, MultiDiffOp, Trivector, TruncSeries, or a list of these.
    """
    if isinstance(residual, (list, tuple)):
        return math.sqrt(sum(exact_norm(r) ** 2 for r in residual))
    for attr in ("terms", "components", "coeffs"):
        parts = getattr(residual, attr, None)
        if parts is not None:
            vals = parts.values() if isinstance(parts, dict) else parts
            return math.sqrt(sum(exact_norm(c) ** 2 for c in vals))
    return abs(complex(residual))


def _is_zero(residual) -> bool:
    if isinstance(residual, (list, tuple)):
        return all(_is_zero(r) for r in residual)
    if hasattr(residual, "is_zero") and callable(residual.is_zero):
        return residual.is_zero()
    return not residual


def exact_check(name: str, residual) -> Check:
    """Pass iff the exact residual is identically zero."""
    zero = _is_zero(residual)
    return Check(name, zero, 0.0 if zero else exact_norm(residual), 0.0, zero)


def numeric_check(name: str, residual: float, tolerance: float) -> Check:
    ok = bool(residual < tolerance) and math.isfinite(residual)
    return Check(name, ok, residual, tolerance, None)


@dataclass
class Report:
    command: str
    inputs: dict = field(default_factory=dict)
    result: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    timing: dict | None = None

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict[str, Any]:
        d = {
            "schema": SCHEMA,
            "command": self.command,
            "inputs": self.inputs,
            "result": self.result,
            "checks": [c.as_dict() for c in self.checks],
            "passed": self.passed,
        }
        if self.timing is not None:
            d["timing"] = self.timing
        return d

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2) + "\n"


def error_json(kind: str, message: str, **extra) -> str:
    err = {"type": kind, "message": message}
    err.update({k: v for k, v in extra.items() if v is not None})
    return json.dumps({"schema": SCHEMA, "error": err}, sort_keys=True) + "\n"
