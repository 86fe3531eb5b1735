"""Nambu brackets, their identities, and RK4 integration of three-dimensional Nambu flows."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Sequence

import numpy as np

from .symcore import DimensionError, Poly, Space, coord_space

__all__ = [
    "nambu_bracket", "fi_residual", "leibniz_residual", "divergence_check", "velocity_field",
    "NambuSystem", "FlowResult", "FlowAborted", "integrate", "euler_top", "nahm_system",
]


def _perm_sign(p: Sequence[int]) -> int:
    sign = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def _det(rows: list[list[Poly]], space: Space) -> Poly:
    """Leibniz-formula determinant with short-circuit on zero entries."""
    n = len(rows)
    out = Poly.zero(space)
    for perm in permutations(range(n)):
        term = None
        for i, j in enumerate(perm):
            e = rows[i][j]
            if not e:
                term = None
                break
            term = e if term is None else term * e
        if term is not None:
            out = out + term if _perm_sign(perm) > 0 else out - term
    return out


def nambu_bracket(*fs: Poly) -> Poly:
    """{f_1, ..., f_n} = det(d f_i / d x_j) on R^n."""
    if len(fs) == 1 and isinstance(fs[0], (list, tuple)):
        fs = tuple(fs[0])
    if not fs:
        raise DimensionError("empty bracket")
    space = fs[0].space
    n = space.nvars
    if len(fs) != n or any(f.space != space for f in fs):
        raise DimensionError(f"an n-bracket needs n = {n} functions on {space}")
    rows = [[f.derive(j) for j in range(n)] for f in fs]
    return _det(rows, space)


def fi_residual(xs: Sequence[Poly], ys: Sequence[Poly]) -> Poly:
    """[x_1..x_{n-1}, [y_1..y_n]] - sum_i [y_1..^y_i..y_n, [x_1..x_{i-1}, y_i, x_i..x_{n-1}]]."""
    xs, ys = list(xs), list(ys)
    n = len(ys)
    if len(xs) != n - 1:
        raise DimensionError("fi_residual needs n-1 functions xs and n functions ys")
    out = nambu_bracket(*xs, nambu_bracket(*ys))
    for i in range(n):
        inner = nambu_bracket(*(xs[:i] + [ys[i]] + xs[i:]))
        out = out - nambu_bracket(*(ys[:i] + ys[i + 1:] + [inner]))
    return out


def leibniz_residual(*xs: Poly) -> Poly:
    """{x0 x1, x2..xn} - x0 {x1, x2..xn} - {x0, x2..xn} x1."""
    if len(xs) == 1 and isinstance(xs[0], (list, tuple)):
        xs = tuple(xs[0])
    x0, x1, rest = xs[0], xs[1], list(xs[2:])
    return (nambu_bracket(x0 * x1, *rest) - x0 * nambu_bracket(x1, *rest)
            - nambu_bracket(x0, *rest) * x1)


def _grad(f: Poly) -> list[Poly]:
    return [f.derive(i) for i in range(f.space.nvars)]


def _cross(a: list[Poly], b: list[Poly]) -> list[Poly]:
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]


def divergence_check(g: Poly, h: Poly) -> Poly:
    """div(grad g x grad h); identically zero."""
    if g.space != coord_space(3) or h.space != g.space:
        raise DimensionError("divergence_check works on R^3")
    v = _cross(_grad(g), _grad(h))
    return v[0].derive(0) + v[1].derive(1) + v[2].derive(2)


def velocity_field(fs: Sequence[Poly]) -> list[Poly]:
    """Components {x_i, f_2, ..., f_n}; on R^3 this is grad g x grad h."""
    fs = list(fs)
    space = fs[0].space
    return [nambu_bracket(Poly.var(space, i), *fs) for i in range(space.nvars)]


@dataclass(frozen=True)
class NambuSystem:
    hamiltonians: tuple[Poly, ...]
    name: str = ""

    def __post_init__(self):
        hs = tuple(self.hamiltonians)
        if not hs:
            raise DimensionError("a Nambu system needs n-1 hamiltonians")
        space = hs[0].space
        if space.kind != "x" or any(h.space != space for h in hs) or len(hs) != space.nvars - 1:
            raise DimensionError("need n-1 hamiltonians sharing R^n")
        object.__setattr__(self, "hamiltonians", hs)

    @property
    def dim(self) -> int:
        return self.hamiltonians[0].space.nvars

    def velocity(self) -> list[Poly]:
        return velocity_field(self.hamiltonians)


def euler_top(I1=1, I2=2, I3=3) -> NambuSystem:
    """g = sum L_i^2 / (2 I_i), h = |L|^2."""
    S = coord_space(3)
    L = [Poly.var(S, i) for i in range(3)]
    g = sum((L[i] * L[i] * Fraction(1, 2) / Fraction(I) for i, I in enumerate((I1, I2, I3))), Poly.zero(S))
    h = L[0] * L[0] + L[1] * L[1] + L[2] * L[2]
    return NambuSystem((g, h), "euler")


def nahm_system() -> NambuSystem:
    """g = (x1^2 - x2^2)/2, h = (x1^2 - x3^2)/2, so that dx_i/dt = x_j x_k."""
    S = coord_space(3)
    x = [Poly.var(S, i) for i in range(3)]
    g = (x[0] * x[0] - x[1] * x[1]) * Fraction(1, 2)
    h = (x[0] * x[0] - x[2] * x[2]) * Fraction(1, 2)
    return NambuSystem((g, h), "nahm")


class FlowAborted(ArithmeticError):
    def __init__(self, step: int, partial: "FlowResult"):
        super().__init__(f"non-finite state at step {step}")
        self.step = step
        self.partial = partial


@dataclass(frozen=True)
class FlowResult:
    times: np.ndarray
    states: np.ndarray
    values: np.ndarray  # hamiltonian values per sample
    drifts: tuple[float, ...]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def ndjson(self, every: int = 1) -> str:
        """One JSON record per sample: t, x1..xn and running conservation drifts."""
        lines = []
        run = np.zeros(len(self.drifts))
        n = self.states.shape[1]
        f0 = self.values[0]
        for k in range(len(self.times)):
            run = np.maximum(run, np.abs(self.values[k] - f0))
            if k % every and k != len(self.times) - 1:
                continue
            rec = {"t": float(self.times[k])}
            rec.update({f"x{i + 1}": float(self.states[k, i]) for i in range(n)})
            rec["drift"] = [float(d) for d in run]
            lines.append(json.dumps(rec, sort_keys=True))
        return "\n".join(lines) + "\n"


def _compile(polys: Sequence[Poly]):
    def fn(x):
        return np.array([p.eval_numeric(list(x), 1.0).real for p in polys])
    return fn


def integrate(system: NambuSystem, r0, dt: float, steps: int) -> FlowResult:
    """Classical fixed-step RK4 on dr/dt = grad g x grad h (n = 3)."""
    if system.dim != 3:
        raise DimensionError("integration is implemented for n = 3")
    if not dt > 0 or steps < 1:
        raise ValueError("need dt > 0 and steps >= 1")
    F = _compile(system.velocity())
    H = _compile(system.hamiltonians)
    x = np.asarray(r0, dtype=float).copy()
    if x.shape != (3,):
        raise DimensionError("initial state must have 3 entries")
    states = np.empty((steps + 1, 3))
    values = np.empty((steps + 1, len(system.hamiltonians)))
    states[0] = x
    values[0] = H(x)
    for s in range(1, steps + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            k1 = F(x)
            k2 = F(x + dt / 2 * k1)
            k3 = F(x + dt / 2 * k2)
            k4 = F(x + dt * k3)
            x = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(x)):
            partial = _result(states[:s], values[:s], dt)
            raise FlowAborted(s, partial)
        states[s] = x
        values[s] = H(x)
    return _result(states, values, dt)


def _result(states: np.ndarray, values: np.ndarray, dt: float) -> FlowResult:
    times = dt * np.arange(len(states))
    drifts = tuple(float(d) for d in np.max(np.abs(values - values[0]), axis=0))
    return FlowResult(times, states, values, drifts)
