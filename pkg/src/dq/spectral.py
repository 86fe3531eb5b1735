"""Star powers, star exponentials and their closed forms for quadratic Hamiltonians."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, isqrt

from .starops import in_preferred_algebra, moyal, moyal_bracket
from .symcore import I, DimensionError, Poly, Scalar, Space, TruncSeries, as_scalar, phase_space
from .symcore.series import cos_coeffs, cosh_coeffs, sin_coeffs, sinh_coeffs
from .weyl import WeylElem, weyl_mul, weyl_quantize

__all__ = [
    "star_power", "star_exp", "QuadraticHamiltonian", "quadratic_closed_form",
    "angular_momentum", "casimir", "casimir_star_constant",
    "BiSeries", "bivariate_star_exp", "bch_series", "bch_group_law", "bch_via_log",
    "WeylElem", "weyl_mul", "weyl_quantize",
]


def star_power(H: Poly, n: int) -> Poly:
    if n < 0:
        raise ValueError("star powers need n >= 0")
    out = Poly.const(H.space, 1)
    for _ in range(n):
        out = moyal(out, H)
    return out


def _inv_ihbar_pow(space: Space, n: int) -> Poly:
    """(i hbar)^{-n} = (-i)^n hbar^{-n}."""
    return Poly.hbar(space, -n) * ((-I) ** n)


def star_exp(H: Poly, K: int) -> TruncSeries:
    """Exp(Ht) = sum_n (t^n / n!) (i hbar)^{-n} (H*)^n through t^K."""
    if K < 0:
        raise ValueError("order K must be >= 0")
    coeffs = []
    power = Poly.const(H.space, 1)
    for n in range(K + 1):
        if n:
            power = moyal(power, H)
        coeffs.append(power * _inv_ihbar_pow(H.space, n) * Fraction(1, factorial(n)))
    return TruncSeries("t", coeffs, space=H.space)


def _exact_sqrt(x: Fraction) -> Fraction | None:
    n, d = x.numerator, x.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """H = alpha |p|^2 + beta p.q + gamma |q|^2 on ell degrees of freedom.

    With the mixed term written as ``beta p.q`` the discriminant governing the
    closed form is ``d = alpha*gamma - beta**2/4``.
    """

    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    ell: int = 1

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = as_scalar(getattr(self, name))
            if v.im:
                raise ValueError(f"{name} must be real")
            object.__setattr__(self, name, v.re)
        if self.ell < 1:
            raise ValueError("ell must be >= 1")

    @property
    def space(self) -> Space:
        return phase_space(self.ell)

    @property
    def d(self) -> Fraction:
        return self.alpha * self.gamma - self.beta ** 2 / 4

    @property
    def sign(self) -> int:
        return (self.d > 0) - (self.d < 0)

    @property
    def delta(self) -> Fraction:
        r = _exact_sqrt(abs(self.d))
        if r is None:
            raise ValueError(
                f"delta = sqrt(|d|) = sqrt({abs(self.d)}) is irrational; rescale H so |d| is a rational square"
            )
        return r

    def poly(self) -> Poly:
        S = self.space
        p = [Poly.var(S, S.p(i)) for i in range(1, self.ell + 1)]
        q = [Poly.var(S, S.q(i)) for i in range(1, self.ell + 1)]
        out = Poly.zero(S)
        for pi, qi in zip(p, q):
            out = out + pi * pi * self.alpha + pi * qi * self.beta + qi * qi * self.gamma
        return out

    @classmethod
    def oscillator(cls, ell: int = 1) -> "QuadraticHamiltonian":
        return cls(Fraction(1, 2), Fraction(0), Fraction(1, 2), ell)

    @classmethod
    def dilation(cls, ell: int = 1) -> "QuadraticHamiltonian":
        return cls(Fraction(0), Fraction(1), Fraction(0), ell)


def _scalar_series(space: Space, values, scale: Fraction, K: int) -> TruncSeries:
    """sum_n values[n] (scale t)^n."""
    return TruncSeries.from_scalars("t", values, space, order=K).rescale_var(scale)


def _series_power(a: TruncSeries, n: int) -> TruncSeries:
    out = TruncSeries.from_scalars("t", [1], a.space, order=a.order)
    for _ in range(n):
        out = out * a
    return out


def quadratic_closed_form(QH: QuadraticHamiltonian, K: int) -> TruncSeries:
    """Taylor coefficients of the closed-form star exponential through t^K.

    d > 0: cos(delta t)^(-l) exp((H / (i hbar delta)) tan(delta t))
    d = 0: exp(H t / (i hbar))
    d < 0: cosh(delta t)^(-l) exp((H / (i hbar delta)) tanh(delta t))
    """
    S = QH.space
    H = QH.poly()
    h_over = H * _inv_ihbar_pow(S, 1)
    if QH.sign == 0:
        arg = TruncSeries.monomial("t", h_over, 1, K)
        return arg.exp()
    delta = QH.delta
    if QH.sign > 0:
        c = _scalar_series(S, cos_coeffs(K), delta, K)
        s = _scalar_series(S, sin_coeffs(K), delta, K)
    else:
        c = _scalar_series(S, cosh_coeffs(K), delta, K)
        s = _scalar_series(S, sinh_coeffs(K), delta, K)
    sec = c.inverse()
    tan = s * sec
    expo = tan.scale(h_over * (1 / delta)).exp()
    return _series_power(sec, QH.ell) * expo


# ---------------------------------------------------------------- angular momentum
def angular_momentum(ell: int, i: int, j: int) -> Poly:
    """L_ij = q_i p_j - q_j p_i (1-based indices)."""
    S = phase_space(ell)
    q, p = (lambda k: Poly.var(S, S.q(k))), (lambda k: Poly.var(S, S.p(k)))
    return q(i) * p(j) - q(j) * p(i)


def _invariants(ell: int) -> tuple[Poly, Poly, Poly]:
    S = phase_space(ell)
    p2 = sum((Poly.var(S, S.p(i)) ** 2 for i in range(1, ell + 1)), Poly.zero(S))
    q2 = sum((Poly.var(S, S.q(i)) ** 2 for i in range(1, ell + 1)), Poly.zero(S))
    pq = sum((Poly.var(S, S.p(i)) * Poly.var(S, S.q(i)) for i in range(1, ell + 1)), Poly.zero(S))
    return p2, q2, pq


def casimir(ell: int) -> Poly:
    """C = p^2 q^2 - (p.q)^2 - l(l-1) hbar^2 / 4."""
    if ell < 2:
        raise ValueError("the angular-momentum Casimir needs ell >= 2")
    p2, q2, pq = _invariants(ell)
    S = phase_space(ell)
    return p2 * q2 - pq * pq - Poly.hbar(S, 2) * Fraction(ell * (ell - 1), 4)


def casimir_star_constant(ell: int) -> Scalar:
    """c with sum_{i<j} L_ij * L_ij - (p^2 q^2 - (p.q)^2) = c hbar^2; raises if not of that form."""
    p2, q2, pq = _invariants(ell)
    S = phase_space(ell)
    acc = Poly.zero(S)
    for i in range(1, ell + 1):
        for j in range(i + 1, ell + 1):
            L = angular_momentum(ell, i, j)
            acc = acc + moyal(L, L)
    diff = acc - (p2 * q2 - pq * pq)
    if diff.is_zero():
        return Scalar(0)
    key = (0,) * S.nvars + (2,)
    if set(diff.terms) != {key}:
        raise ArithmeticError(f"star square differs by a non-constant: {diff}")
    return diff.terms[key]


# ---------------------------------------------------------------- two-variable series and BCH
class BiSeries:
    """Truncated series sum c_{ij} s^i t^j over i + j <= K with Poly coefficients."""

    __slots__ = ("space", "order", "coeffs")

    def __init__(self, space: Space, order: int, coeffs=None):
        self.space = space
        self.order = order
        self.coeffs = {k: c for k, c in (coeffs or {}).items() if c and sum(k) <= order}

    @classmethod
    def from_univariate(cls, a: TruncSeries, var: str, order: int) -> "BiSeries":
        out = {}
        for n, c in enumerate(a.coeffs[: order + 1]):
            out[(n, 0) if var == "s" else (0, n)] = c
        return cls(a.space, order, out)

    def __add__(self, other: "BiSeries") -> "BiSeries":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        return BiSeries(self.space, self.order, out)

    def __sub__(self, other: "BiSeries") -> "BiSeries":
        return self + other.scale(-1)

    def scale(self, c) -> "BiSeries":
        return BiSeries(self.space, self.order, {k: v * c for k, v in self.coeffs.items()})

    def star(self, other: "BiSeries") -> "BiSeries":
        out: dict = {}
        for (a, b), x in self.coeffs.items():
            for (c, d), y in other.coeffs.items():
                k = (a + c, b + d)
                if sum(k) > self.order:
                    continue
                z = moyal(x, y)
                out[k] = out[k] + z if k in out else z
        return BiSeries(self.space, self.order, out)

    def constant(self) -> Poly:
        return self.coeffs.get((0, 0), Poly.zero(self.space))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, BiSeries):
            return NotImplemented
        return self.space == other.space and self.order == other.order and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        body = " + ".join(f"({c})*s^{i}*t^{j}" for (i, j), c in sorted(self.coeffs.items())) or "0"
        return f"BiSeries[K={self.order}]({body})"


def bivariate_star_exp(Z: BiSeries) -> BiSeries:
    """sum_n (i hbar)^{-n} (Z*)^n / n! for Z without constant term."""
    if Z.constant():
        raise ValueError("star exponential of a bivariate series needs a zero constant term")
    one = BiSeries(Z.space, Z.order, {(0, 0): Poly.const(Z.space, 1)})
    out, power = one, one
    for n in range(1, Z.order + 1):
        power = power.star(Z)
        if power.is_zero():
            break
        out = out + power.scale(_inv_ihbar_pow(Z.space, n) * Fraction(1, factorial(n)))
    return out


def _bracket_terms(u: Poly, v: Poly):
    """Nested brackets needed through total degree 4, plus the degree-3 pair."""
    m_uv = moyal_bracket(u, v)
    m_u_uv = moyal_bracket(u, m_uv)
    m_v_uv = moyal_bracket(v, m_uv)
    m_v_u_uv = moyal_bracket(v, m_u_uv)
    return m_uv, m_u_uv, m_v_uv, m_v_u_uv


def bch_series(u: Poly, v: Poly, K: int) -> BiSeries:
    """Z(s, t) with Exp(us) * Exp(vt) = Exp(Z), using M = (u*v - v*u)/(i hbar).

    Z = us + vt + (st/2) M(u,v) + (1/12)(s^2 t M(u,M(u,v)) - s t^2 M(v,M(u,v)))
        - (1/24) s^2 t^2 M(v,M(u,M(u,v))) + ...
    Only terms through total degree 4 are known here; higher K is accepted when
    all degree-3 brackets vanish, since the series then stops at degree 2.
    """
    m_uv, m_u_uv, m_v_uv, m_v_u_uv = _bracket_terms(u, v)
    terminating = not m_u_uv and not m_v_uv
    if K > 4 and not terminating:
        raise ValueError("BCH beyond joint order 4 is only available when it terminates")
    terms = {(1, 0): u, (0, 1): v, (1, 1): m_uv * Fraction(1, 2),
             (2, 1): m_u_uv * Fraction(1, 12), (1, 2): m_v_uv * Fraction(-1, 12),
             (2, 2): m_v_u_uv * Fraction(-1, 24)}
    return BiSeries(u.space, K, terms)


def bch_via_log(u: Poly, v: Poly, K: int) -> BiSeries:
    """Independent route: Z = i hbar log_*(Exp(us) * Exp(vt)) by the log series."""
    X = _product_series(u, v, K)
    X = X - BiSeries(u.space, K, {(0, 0): Poly.const(u.space, 1)})
    out = BiSeries(u.space, K)
    power = BiSeries(u.space, K, {(0, 0): Poly.const(u.space, 1)})
    for n in range(1, K + 1):
        power = power.star(X)
        out = out + power.scale(Fraction((-1) ** (n + 1), n))
    return out.scale(Poly.hbar(u.space, 1) * I)


def _product_series(u: Poly, v: Poly, K: int) -> BiSeries:
    a = BiSeries.from_univariate(star_exp(u, K), "s", K)
    b = BiSeries.from_univariate(star_exp(v, K), "t", K)
    return a.star(b)


def bch_group_law(u: Poly, v: Poly, K: int) -> BiSeries:
    """Residual Exp(us) * Exp(vt) - Exp(BCH(us, vt)) through joint order K."""
    if u.space != v.space:
        raise DimensionError("u and v on different spaces")
    if not in_preferred_algebra(u) or not in_preferred_algebra(v):
        raise ValueError("the group law is checked for inputs of degree <= 2 only")
    Z = bch_series(u, v, K)
    return _product_series(u, v, K) - bivariate_star_exp(Z)
