"""Poisson structures, the Moyal star product and its relatives.

Convention: phase-space coordinates are ordered ``(p_1..p_l, q_1..q_l)`` and the
canonical tensor is ``(0 -I; I 0)``, so ``P(u, v) = sum_i du/dq_i dv/dp_i -
du/dp_i dv/dq_i`` and ``P(q, p) = 1``.  The deformation parameter is
``nu = i*hbar/2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import factorial
from typing import Mapping, Sequence

from .cohomlab.cochain import ArityError, MultiDiffOp
from .symcore import I, DimensionError, Poly, Scalar, Space, TruncSeries, coord_space, phase_space

__all__ = [
    "PoissonTensor", "StarCochains", "Equivalence",
    "NU", "poisson", "poisson_power", "poisson_power_op", "moyal", "moyal_bracket",
    "moyal_cochains", "star_from_cochains", "transported_product", "transported_cochains",
    "standard_equivalence", "normal_equivalence", "ordering_product",
    "conformal_star", "conformal_poisson", "conformal_bracket", "in_preferred_algebra",
]

NU = I * Fraction(1, 2)  # nu = NU * hbar


def nu_power(space: Space, r: int) -> Poly:
    """nu**r = (i/2)**r hbar**r as a Poly."""
    return Poly.hbar(space, r) * (NU ** r)


@dataclass(frozen=True, eq=False)
class PoissonTensor:
    """Skew bivector with polynomial components; only i < j is stored."""

    space: Space
    components: Mapping[tuple[int, int], Poly] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        d = self.space.nvars
        for (i, j), c in dict(self.components).items():
            if not (0 <= i < d and 0 <= j < d):
                raise DimensionError(f"component ({i},{j}) outside dimension {d}")
            if i == j:
                if c:
                    raise ValueError("diagonal entries of a bivector must vanish")
                continue
            if i > j:
                i, j, c = j, i, -c
            if not isinstance(c, Poly):
                c = Poly.const(self.space, c)
            if (i, j) in clean:
                c = clean[(i, j)] + c
            if c:
                clean[(i, j)] = c
        object.__setattr__(self, "components", clean)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PoissonTensor):
            return NotImplemented
        return self.space == other.space and self.components == other.components

    def __hash__(self):
        return hash((self.space, frozenset(self.components.items())))

    @property
    def dim(self) -> int:
        return self.space.nvars

    @classmethod
    def canonical(cls, ell_or_space: int | Space) -> "PoissonTensor":
        space = ell_or_space if isinstance(ell_or_space, Space) else phase_space(ell_or_space)
        comps = {(space.p(i), space.q(i)): Poly.const(space, -1) for i in range(1, space.ell + 1)}
        return cls(space, comps)

    @classmethod
    def so3(cls) -> "PoissonTensor":
        """Lie-Poisson tensor of so(3): Lambda^{ij} = eps^{ijk} x_k on R^3."""
        space = coord_space(3)
        x = [Poly.var(space, i) for i in range(3)]
        return cls(space, {(0, 1): x[2], (1, 2): x[0], (0, 2): -x[1]})

    def entry(self, i: int, j: int) -> Poly:
        if i == j:
            return Poly.zero(self.space)
        if i < j:
            return self.components.get((i, j), Poly.zero(self.space))
        return -self.components.get((j, i), Poly.zero(self.space))

    def nonzero_entries(self) -> list[tuple[int, int, Poly]]:
        """All ordered (i, j, Lambda^ij) with Lambda^ij != 0, both orientations."""
        out = []
        for (i, j), c in sorted(self.components.items()):
            out.append((i, j, c))
            out.append((j, i, -c))
        return sorted(out, key=lambda t: (t[0], t[1]))

    def is_constant(self) -> bool:
        return all(c.is_constant() for c in self.components.values())

    def bracket(self, u: Poly, v: Poly) -> Poly:
        if u.space != self.space or v.space != self.space:
            raise DimensionError("bracket arguments must live on the tensor's space")
        out = Poly.zero(self.space)
        for (i, j), c in self.components.items():
            t = u.derive(i) * v.derive(j) - u.derive(j) * v.derive(i)
            if t:
                out = out + c * t
        return out

    def as_cochain(self) -> MultiDiffOp:
        return poisson_power_op(self, 1)

    def __add__(self, other: "PoissonTensor") -> "PoissonTensor":
        if other.space != self.space:
            raise DimensionError("tensors on different spaces")
        comps = dict(self.components)
        for k, c in other.components.items():
            comps[k] = comps[k] + c if k in comps else c
        return PoissonTensor(self.space, comps)

    def scale(self, c) -> "PoissonTensor":
        return PoissonTensor(self.space, {k: v * c for k, v in self.components.items()})


def _canonical_for(u: Poly, v: Poly) -> PoissonTensor:
    if u.space != v.space:
        raise DimensionError(f"cannot combine {u.space} with {v.space}")
    if u.space.kind != "pq":
        raise DimensionError("the canonical bracket needs a phase space (p, q) variables")
    return _canonical_cached(u.space)


@lru_cache(maxsize=None)
def _canonical_cached(space: Space) -> PoissonTensor:
    return PoissonTensor.canonical(space)


def poisson(u: Poly, v: Poly, tensor: PoissonTensor | None = None) -> Poly:
    """Poisson bracket P(u, v); canonical tensor unless one is given."""
    tensor = tensor or _canonical_for(u, v)
    return tensor.bracket(u, v)


@lru_cache(maxsize=None)
def _power_terms(tensor: PoissonTensor, r: int):
    """Multinomial expansion of P^r: list of (coefficient Poly, alpha, beta)."""
    pairs = tensor.nonzero_entries()
    d = tensor.dim
    out: dict[tuple, Poly] = {}
    for combo in combinations_with_replacement(range(len(pairs)), r):
        counts: dict[int, int] = {}
        for c in combo:
            counts[c] = counts.get(c, 0) + 1
        weight = factorial(r)
        for m in counts.values():
            weight //= factorial(m)
        coeff = Poly.const(tensor.space, weight)
        alpha = [0] * d
        beta = [0] * d
        for idx, m in counts.items():
            i, j, lam = pairs[idx]
            coeff = coeff * (lam ** m)
            alpha[i] += m
            beta[j] += m
        key = (tuple(alpha), tuple(beta))
        out[key] = out[key] + coeff if key in out else coeff
    return tuple((c, a, b) for (a, b), c in out.items() if c)


def poisson_power_op(tensor: PoissonTensor, r: int) -> MultiDiffOp:
    """P^r as a bidifferential cochain (coefficients outside the derivatives)."""
    if r < 1:
        raise ValueError("P^r needs r >= 1; r = 0 is the pointwise product")
    return MultiDiffOp(tensor.space, 2, {(a, b): c for c, a, b in _power_terms(tensor, r)})


def poisson_power(u: Poly, v: Poly, r: int, tensor: PoissonTensor | None = None) -> Poly:
    """P^r(u, v) = Lambda^{i1 j1}..Lambda^{ir jr} (d_{i1..ir} u)(d_{j1..jr} v)."""
    if r < 1:
        raise ValueError("P^r needs r >= 1; use the ordinary product for r = 0")
    tensor = tensor or _canonical_for(u, v)
    if u.space != tensor.space or v.space != tensor.space:
        raise DimensionError("arguments must live on the tensor's space")
    out = Poly.zero(u.space)
    du: dict = {}
    dv: dict = {}
    for c, a, b in _power_terms(tensor, r):
        x = du.get(a)
        if x is None:
            x = du[a] = u.derive_multi(a)
        if not x:
            continue
        y = dv.get(b)
        if y is None:
            y = dv[b] = v.derive_multi(b)
        if y:
            out = out + c * x * y
    return out


# ---------------------------------------------------------------- Moyal
@lru_cache(maxsize=None)
def _falling(n: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= n - j
    return out


@lru_cache(maxsize=65536)
def _pair_factor(a: int, b: int, c: int, d: int) -> tuple:
    """One conjugate pair: exp(nu(dq x dp - dp x dq)) on (p^a q^b, p^c q^d).

    Returns tuples (new p exp, new q exp, nu power, rational weight).
    """
    out = []
    for j in range(min(b, c) + 1):
        for k in range(min(a, d) + 1):
            w = Fraction(
                (-1) ** k * _falling(b, j) * _falling(c, j) * _falling(a, k) * _falling(d, k),
                factorial(j) * factorial(k),
            )
            out.append((a - k + c - j, b - j + d - k, j + k, w))
    return tuple(out)


@lru_cache(maxsize=None)
def _nu_scalar(r: int) -> Scalar:
    return NU ** r


@lru_cache(maxsize=200000)
def _moyal_monomials(k1: tuple, k2: tuple, ell: int) -> tuple:
    """Moyal product of two monic monomials (exponent keys incl. hbar)."""
    partial = [((), 0, Fraction(1))]
    for i in range(ell):
        f = _pair_factor(k1[i], k1[ell + i], k2[i], k2[ell + i])
        nxt = []
        for exps, r, w in partial:
            for pe, qe, rr, ww in f:
                nxt.append((exps + ((pe, qe),), r + rr, w * ww))
        partial = nxt
    h = k1[-1] + k2[-1]
    out: dict[tuple, Scalar] = {}
    for exps, r, w in partial:
        key = tuple(e[0] for e in exps) + tuple(e[1] for e in exps) + (h + r,)
        val = _nu_scalar(r) * w
        out[key] = out[key] + val if key in out else val
    return tuple((k, c) for k, c in out.items() if c)


def moyal(u: Poly, v: Poly) -> Poly:
    """Exact Moyal product exp(nu P)(u, v); the series terminates on polynomials."""
    space = _canonical_for(u, v).space
    ell = space.ell
    out: dict[tuple, Scalar] = {}
    for k1, c1 in u.terms.items():
        for k2, c2 in v.terms.items():
            c = c1 * c2
            for k, w in _moyal_monomials(k1, k2, ell):
                val = c * w
                s = out.get(k)
                out[k] = val if s is None else s + val
    return Poly(space, {k: c for k, c in out.items() if c})


def moyal_bracket(u: Poly, v: Poly) -> Poly:
    """M(u, v) = (u*v - v*u) / (2 nu) = nu^{-1} sinh(nu P)(u, v)."""
    diff = moyal(u, v) - moyal(v, u)
    return diff * Poly.hbar(u.space, -1) * (-I)


# ---------------------------------------------------------------- cochain-level star products
@dataclass(frozen=True)
class StarCochains:
    """u * v = uv + sum_{r=1..R} nu^r C_r(u, v)."""

    space: Space
    cochains: tuple[MultiDiffOp, ...]
    exact: bool = False

    def __post_init__(self):
        for c in self.cochains:
            if c.arity != 2 or c.space != self.space:
                raise ArityError("star cochains must be 2-cochains on the product's space")
        object.__setattr__(self, "cochains", tuple(self.cochains))

    @property
    def order(self) -> int:
        return len(self.cochains)

    def C(self, r: int) -> MultiDiffOp:
        if r == 0:
            return MultiDiffOp.multiplication(self.space)
        if r <= len(self.cochains):
            return self.cochains[r - 1]
        if self.exact:
            return MultiDiffOp.zero(self.space, 2)
        raise ValueError(f"cochain C_{r} beyond truncation order {self.order}")

    def product(self, u: Poly, v: Poly, order: int | None = None) -> Poly:
        return star_from_cochains(self, u, v, order)


def moyal_cochains(ell_or_tensor: int | PoissonTensor, R: int) -> StarCochains:
    """C_r = P^r / r! for r = 1..R (exact once R exceeds the degrees involved)."""
    tensor = ell_or_tensor if isinstance(ell_or_tensor, PoissonTensor) else PoissonTensor.canonical(ell_or_tensor)
    cs = tuple(poisson_power_op(tensor, r).scale(Fraction(1, factorial(r))) for r in range(1, R + 1))
    return StarCochains(tensor.space, cs, exact=False)


def star_from_cochains(cs: StarCochains, u: Poly, v: Poly, order: int | None = None) -> Poly:
    R = cs.order if order is None else order
    out = u * v
    for r in range(1, R + 1):
        term = cs.C(r)(u, v)
        if term:
            out = out + term * nu_power(cs.space, r)
    return out


@dataclass(frozen=True)
class Equivalence:
    """T = I + sum_{r>=1} nu^r T_r with differential operators T_r."""

    space: Space
    terms: tuple[MultiDiffOp, ...]

    def __post_init__(self):
        terms = tuple(self.terms)
        for t in terms:
            if t.arity != 1 or t.space != self.space:
                raise ArityError("equivalence terms must be 1-cochains on one space")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_series(cls, space: Space, terms: Sequence[MultiDiffOp]) -> "Equivalence":
        """Accept T_0, T_1, ..., rejecting a leading term other than the identity."""
        terms = list(terms)
        if not terms:
            return cls(space, ())
        if terms[0] != MultiDiffOp.identity(space):
            raise ValueError("equivalence must start with the identity (T_0 = I) to be invertible")
        return cls(space, tuple(terms[1:]))

    @property
    def order(self) -> int:
        return len(self.terms)

    def T(self, r: int) -> MultiDiffOp:
        if r == 0:
            return MultiDiffOp.identity(self.space)
        if r <= len(self.terms):
            return self.terms[r - 1]
        return MultiDiffOp.zero(self.space, 1)

    def apply(self, u: Poly, order: int) -> Poly:
        out = u
        for r in range(1, min(order, self.order) + 1):
            t = self.T(r)(u)
            if t:
                out = out + t * nu_power(self.space, r)
        return out

    def apply_inverse(self, w: Poly, order: int) -> Poly:
        """Solve T x = w modulo hbar^(order+1) by fixed-point iteration."""
        x = w.truncate_hbar(order)
        for _ in range(order + 1):
            corr = Poly.zero(self.space)
            for r in range(1, min(order, self.order) + 1):
                t = self.T(r)(x)
                if t:
                    corr = corr + t * nu_power(self.space, r)
            x = (w - corr).truncate_hbar(order)
        return x


def transported_product(u: Poly, v: Poly, T: Equivalence | Sequence[MultiDiffOp],
                        base: StarCochains | None = None, order: int = 4) -> Poly:
    """u *' v = T^{-1}(T u * T v), truncated at nu^order (hbar^order)."""
    if not isinstance(T, Equivalence):
        T = Equivalence(u.space, tuple(T))
    if u.space != T.space or v.space != T.space:
        raise DimensionError("equivalence and arguments on different spaces")
    Tu, Tv = T.apply(u, order), T.apply(v, order)
    if base is None:
        w = moyal(Tu, Tv)
    else:
        if not base.exact and base.order < order:
            raise ValueError(f"base product truncated at {base.order} < requested order {order}")
        w = star_from_cochains(base, Tu, Tv, order)
    return T.apply_inverse(w.truncate_hbar(order), order)


def _compose_1(a: MultiDiffOp, b: MultiDiffOp) -> MultiDiffOp:
    """a o b for 1-cochains."""
    return a.substitute(0, b)


def _inverse_terms(T: Equivalence, R: int) -> list[MultiDiffOp]:
    """S with (I + sum nu^r S_r) = T^{-1} through order R."""
    S = [MultiDiffOp.identity(T.space)]
    for n in range(1, R + 1):
        acc = MultiDiffOp.zero(T.space, 1)
        for k in range(1, n + 1):
            acc = acc - _compose_1(T.T(k), S[n - k])
        S.append(acc)
    return S


def transported_cochains(T: Equivalence | Sequence[MultiDiffOp], base: StarCochains, R: int) -> StarCochains:
    """Cochains C'_r of T^{-1}(T . * T .), built symbolically through order R."""
    if not isinstance(T, Equivalence):
        T = Equivalence(base.space, tuple(T))
    if not base.exact and base.order < R:
        raise ValueError("base product truncated below the requested order")
    S = _inverse_terms(T, R)
    # X_n(u, v) = sum_{a+b+c=n} C_c(T_a u, T_b v)
    X = []
    for n in range(R + 1):
        acc = MultiDiffOp.zero(base.space, 2)
        for c in range(n + 1):
            Cc = base.C(c)
            if not Cc:
                continue
            for a in range(n - c + 1):
                b = n - c - a
                Ta, Tb = T.T(a), T.T(b)
                if not Ta or not Tb:
                    continue
                acc = acc + Cc.substitute(0, Ta).substitute(1, Tb)
        X.append(acc)
    out = []
    for n in range(1, R + 1):
        acc = MultiDiffOp.zero(base.space, 2)
        for k in range(n + 1):
            if S[k] and X[n - k]:
                acc = acc + S[k].substitute(0, X[n - k])
        out.append(acc)
    return StarCochains(base.space, tuple(out), exact=False)


def _laplace_like(space: Space, kind: str) -> MultiDiffOp:
    ell = space.ell
    terms = {}
    for i in range(1, ell + 1):
        if kind == "standard":
            a = [0] * space.nvars
            a[space.p(i)] = 1
            a[space.q(i)] = 1
            terms[(tuple(a),)] = Poly.const(space, 1)
        else:
            for slot in (space.p(i), space.q(i)):
                a = [0] * space.nvars
                a[slot] = 2
                terms[(tuple(a),)] = Poly.const(space, 1)
    return MultiDiffOp(space, 1, terms)


def _exp_equivalence(space: Space, D: MultiDiffOp, scale: Scalar, R: int) -> Equivalence:
    """exp(nu * scale * D) truncated at nu^R."""
    terms = []
    power = MultiDiffOp.identity(space)
    for r in range(1, R + 1):
        power = _compose_1(D, power)
        terms.append(power.scale(scale ** r * Fraction(1, factorial(r))))
    return Equivalence(space, tuple(terms))


def standard_equivalence(space: Space, R: int) -> Equivalence:
    """T = exp(nu sum_i d^2/dp_i dq_i)."""
    return _exp_equivalence(space, _laplace_like(space, "standard"), Scalar(1), R)


def normal_equivalence(space: Space, R: int) -> Equivalence:
    """T = exp((hbar/4) sum_i (d^2/dp_i^2 + d^2/dq_i^2)); hbar/4 = nu * (-i/2)."""
    return _exp_equivalence(space, _laplace_like(space, "normal"), Scalar(0, Fraction(-1, 2)), R)


def ordering_product(u: Poly, v: Poly, ordering: str = "weyl") -> Poly:
    """Star product in Weyl, standard or normal ordering (exact on polynomials)."""
    if ordering == "weyl":
        return moyal(u, v)
    space = _canonical_for(u, v).space
    # T_r vanishes on degree < 2r, and hbar powers beyond deg u + deg v + hbar content cannot survive
    R = max(u.degree(), 0) + max(v.degree(), 0) + max(u.hbar_degree(), 0) + max(v.hbar_degree(), 0)
    if ordering == "standard":
        T = standard_equivalence(space, R)
    elif ordering == "normal":
        T = normal_equivalence(space, R)
    else:
        raise ValueError(f"unknown ordering {ordering!r}")
    return transported_product(u, v, T, order=R)


# ---------------------------------------------------------------- conformal (Rubio) products
def conformal_star(u: Poly, v: Poly, f: TruncSeries) -> TruncSeries:
    """u ~* v = u * f * v with f a beta-series, f_0 invertible."""
    if f.var != "beta":
        raise ValueError("the conformal factor must be a series in beta")
    f0 = f.coeffs[0]
    if f0.is_zero() or not f0.is_constant():
        raise ValueError("conformal factor needs an invertible (nonzero constant) leading term")
    if u.space != f.space or v.space != f.space:
        raise DimensionError("arguments and conformal factor on different spaces")
    coeffs = []
    for fk in f.coeffs:
        coeffs.append(moyal(moyal(u, fk), v) if fk else Poly.zero(u.space))
    return TruncSeries("beta", coeffs, space=u.space)


def conformal_star_series(a: TruncSeries, b: TruncSeries, f: TruncSeries) -> TruncSeries:
    """Extend ~* to beta-series arguments (Cauchy product in beta)."""
    K = f.order
    out = []
    for n in range(K + 1):
        acc = Poly.zero(f.space)
        for i in range(n + 1):
            for j in range(n - i + 1):
                k = n - i - j
                if a.coeffs[i] and f.coeffs[j] and b.coeffs[k]:
                    acc = acc + moyal(moyal(a.coeffs[i], f.coeffs[j]), b.coeffs[k])
        out.append(acc)
    return TruncSeries("beta", out, space=f.space)


def conformal_bracket(u: Poly, v: Poly, f: TruncSeries) -> TruncSeries:
    """(2 nu)^{-1} (u ~* v - v ~* u) as a beta-series."""
    a, b = conformal_star(u, v, f), conformal_star(v, u, f)
    h = Poly.hbar(u.space, -1) * (-I)
    return TruncSeries("beta", [(x - y) * h for x, y in zip(a.coeffs, b.coeffs)], space=u.space)


def conformal_poisson(u: Poly, v: Poly, f: Poly) -> Poly:
    """P_f(u, v) = f P(u, v) + u P(f, v) - P(f, u) v."""
    return f * poisson(u, v) + u * poisson(f, v) - poisson(f, u) * v


def in_preferred_algebra(a: Poly) -> bool:
    """True iff every third coordinate derivative of a vanishes (degree <= 2)."""
    n = a.space.nvars
    for i in range(n):
        di = a.derive(i)
        for j in range(i, n):
            dij = di.derive(j)
            for k in range(j, n):
                if dij.derive(k):
                    return False
    return True
