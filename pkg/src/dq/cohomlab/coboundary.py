"""Hochschild and Chevalley-Eilenberg coboundaries, obstruction equations, preimages."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

from ..symcore import Poly, Scalar, Space
from .cochain import ArityError, MultiDiffOp, monomial_probes, probe_tuples

__all__ = [
    "apply_cochain", "hochschild_b", "chevalley_d", "Obstruction",
    "obstruction_hochschild", "obstruction_chevalley", "coboundary_preimage",
    "NotACocycle", "agree_on_probes",
]


class NotACocycle(ValueError):
    def __init__(self, residual: MultiDiffOp):
        super().__init__(f"input is not a cocycle; residual {residual!r}")
        self.residual = residual


def apply_cochain(C: MultiDiffOp, *args: Poly) -> Poly:
    return C.apply(args)


def hochschild_b(C: MultiDiffOp) -> MultiDiffOp:
    """bC(u_0..u_p) = u_0 C(u_1..) + sum_i (-1)^i C(.., u_{i-1}u_i, ..) + (-1)^{p+1} C(u_0..u_{p-1}) u_p."""
    p = C.arity
    if p < 1:
        raise ArityError("hochschild_b needs a cochain of arity >= 1")
    m = MultiDiffOp.multiplication(C.space)
    out = m.substitute(1, C)
    for i in range(1, p + 1):
        t = C.substitute(i - 1, m)
        out = out + t if i % 2 == 0 else out - t
    last = m.substitute(0, C)
    return out + last if (p + 1) % 2 == 0 else out - last


def _bracket_op(bracket, space: Space) -> MultiDiffOp:
    if isinstance(bracket, MultiDiffOp):
        op = bracket
    else:
        op = bracket.as_cochain()
    if op.arity != 2 or op.space != space:
        raise ArityError("the Lie bracket must be a 2-cochain on the cochain's space")
    return op


def chevalley_d(B: MultiDiffOp, bracket=None) -> MultiDiffOp:
    """Chevalley coboundary for the Lie algebra (polynomials, bracket).

    ``bracket`` is a PoissonTensor or a skew 2-cochain; canonical by default.
    """
    if B.arity >= 2 and not B.is_skew():
        raise ValueError("chevalley_d needs a skew-symmetric cochain")
    if bracket is None:
        from ..starops import PoissonTensor
        bracket = PoissonTensor.canonical(B.space)
    Pop = _bracket_op(bracket, B.space)
    p = B.arity
    n = p + 1
    out = MultiDiffOp.zero(B.space, n)
    X = Pop.substitute(1, B)  # X(a, b_1..b_p) = {a, B(b..)}
    for j in range(n):
        order = [j] + [k for k in range(n) if k != j]
        t = X.reindex(order)
        out = out + t if j % 2 == 0 else out - t
    if p >= 1:
        Y = B.substitute(0, Pop)  # Y(a, b, c..) = B({a, b}, c..)
        for i in range(n):
            for j in range(i + 1, n):
                order = [i, j] + [k for k in range(n) if k not in (i, j)]
                t = Y.reindex(order)
                out = out + t if (i + j) % 2 == 0 else out - t
    return out


@dataclass(frozen=True)
class Obstruction:
    """Both sides of an order-r deformation equation, as 3-cochains."""

    r: int
    lhs: MultiDiffOp
    rhs: MultiDiffOp

    def residual(self) -> MultiDiffOp:
        return self.lhs - self.rhs

    def holds(self) -> bool:
        return self.lhs == self.rhs

    def __iter__(self):
        yield self.lhs
        yield self.rhs


def obstruction_hochschild(Cs, r: int) -> Obstruction:
    """D_r = sum_{j+k=r, j,k>=1} C_j(C_k(u,v),w) - C_j(u,C_k(v,w)) against bC_r."""
    space = Cs.space
    if r < 1:
        raise ValueError("order r must be >= 1")
    lhs = MultiDiffOp.zero(space, 3)
    for j in range(1, r):
        Cj, Ck = Cs.C(j), Cs.C(r - j)
        if Cj and Ck:
            lhs = lhs + Cj.substitute(0, Ck) - Cj.substitute(1, Ck)
    return Obstruction(r, lhs, hochschild_b(Cs.C(r)))


def _cyclic(F: MultiDiffOp) -> MultiDiffOp:
    return F + F.reindex([1, 2, 0]) + F.reindex([2, 0, 1])


def obstruction_chevalley(Bs: Sequence[MultiDiffOp], r: int, bracket=None) -> Obstruction:
    """E_r = sum_{j+k=r, j,k>=1} S B_j(B_k(u,v),w) against dB_r; Bs[0] is B_1."""
    Bs = list(Bs)
    if r < 1 or r > len(Bs):
        raise ValueError(f"order {r} outside the supplied cochains 1..{len(Bs)}")
    space = Bs[0].space
    for B in Bs:
        if B.arity != 2 or not B.is_skew():
            raise ValueError("Chevalley obstruction needs skew 2-cochains")
    lhs = MultiDiffOp.zero(space, 3)
    for j in range(1, r):
        Bj, Bk = Bs[j - 1], Bs[r - j - 1]
        if Bj and Bk:
            lhs = lhs + _cyclic(Bj.substitute(0, Bk))
    return Obstruction(r, lhs, chevalley_d(Bs[r - 1], bracket))


def agree_on_probes(A: MultiDiffOp, B: MultiDiffOp, max_degree: int | None = None) -> bool:
    """Compare two cochains by evaluation on all monomial tuples up to a degree bound."""
    if A.arity != B.arity or A.space != B.space:
        return False
    if max_degree is None:
        max_degree = max(A.max_order(), B.max_order()) + 2
    return all(A.apply(t) == B.apply(t) for t in probe_tuples(A.space, A.arity, max_degree))


# ---------------------------------------------------------------- preimage solving
def _multi_indices(n: int, max_order: int) -> list[tuple[int, ...]]:
    out = []
    for a in product(range(max_order + 1), repeat=n):
        if sum(a) <= max_order:
            out.append(a)
    return out


def _ansatz_basis(space: Space, arity: int, max_order: int, coeff_degree: int,
                  hbar_powers: Sequence[int], skew: bool) -> list[MultiDiffOp]:
    idx = _multi_indices(space.nvars, max_order)
    coeffs = [m * Poly.hbar(space, h) for m in monomial_probes(space, coeff_degree) for h in hbar_powers]
    basis = []
    seen = set()
    for key in product(idx, repeat=arity):
        if sum(sum(a) for a in key) > max_order:
            continue
        for c in coeffs:
            op = MultiDiffOp(space, arity, {key: c})
            if skew and arity >= 2:
                op = _skewize(op)
                if not op or op in seen or -op in seen:
                    continue
                seen.add(op)
            basis.append(op)
    return basis


def _skewize(op: MultiDiffOp) -> MultiDiffOp:
    from itertools import permutations
    out = MultiDiffOp.zero(op.space, op.arity)
    for perm in permutations(range(op.arity)):
        sign = 1
        p = list(perm)
        for i in range(len(p)):
            for j in range(i + 1, len(p)):
                if p[i] > p[j]:
                    sign = -sign
        t = op.reindex(perm)
        out = out + t if sign > 0 else out - t
    return out


def _flatten(op: MultiDiffOp) -> dict:
    out = {}
    for key, c in op.terms.items():
        for mono, s in c.terms.items():
            out[(key, mono)] = s
    return out


def _solve(columns: list[dict], target: dict) -> list[Scalar] | None:
    """Exact Gauss-Jordan on the sparse system sum_j x_j columns[j] = target."""
    rows = sorted({k for col in columns for k in col} | set(target))
    rindex = {k: i for i, k in enumerate(rows)}
    ncol = len(columns)
    zero = Scalar(0)
    M = [[zero] * (ncol + 1) for _ in rows]
    for j, col in enumerate(columns):
        for k, v in col.items():
            M[rindex[k]][j] = v
    for k, v in target.items():
        M[rindex[k]][ncol] = v
    pivots = []
    r = 0
    for c in range(ncol):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = M[r][c].inverse()
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    for i in range(r, len(M)):
        if M[i][ncol]:
            return None
    x = [zero] * ncol
    for i, c in enumerate(pivots):
        x[c] = M[i][ncol]
    return x


def coboundary_preimage(Z: MultiDiffOp, theory: str = "hochschild", max_order: int | None = None,
                        coeff_degree: int | None = None, bracket=None) -> MultiDiffOp | None:
    """Find C in a finite ansatz with bC = Z (or dC = Z); None if the ansatz has no solution.

    The ansatz spans cochains of arity ``Z.arity - 1`` whose terms have total
    derivative order <= max_order and monomial coefficients of degree <= coeff_degree.
    """
    if theory not in ("hochschild", "chevalley"):
        raise ValueError(f"unknown theory {theory!r}")
    if Z.arity < 2:
        raise ArityError("preimages are sought for cochains of arity >= 2")
    d = hochschild_b if theory == "hochschild" else (lambda C: chevalley_d(C, bracket))
    res = d(Z)
    if res:
        raise NotACocycle(res)
    if not Z:
        return MultiDiffOp.zero(Z.space, Z.arity - 1)
    if max_order is None:
        max_order = Z.max_order()
    if coeff_degree is None:
        coeff_degree = max(Z.coefficient_degree(), 0) + 1
    hbar_powers = sorted({k[-1] for c in Z.terms.values() for k in c.terms})
    basis = _ansatz_basis(Z.space, Z.arity - 1, max_order, coeff_degree, hbar_powers,
                          skew=theory == "chevalley")
    images = [_flatten(d(B)) for B in basis]
    x = _solve(images, _flatten(Z))
    if x is None:
        return None
    out = MultiDiffOp.zero(Z.space, Z.arity - 1)
    for xi, B in zip(x, basis):
        if xi:
            out = out + B.scale(xi)
    return out
