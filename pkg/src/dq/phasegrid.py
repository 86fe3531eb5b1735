"""Grid-sampled phase-space functions and a numeric Moyal product.

Grids cover ``[-L, L)`` on both axes with ``values[ip, iq]``, so axis 0 is p
and axis 1 is q.  The star product matches the exact kernel's convention,
``q * p - p * q = i hbar``.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np
from scipy.special import eval_laguerre

from .starops import NU, PoissonTensor, poisson_power_op
from .symcore import Poly, phase_space

__all__ = [
    "Grid2D", "GridMismatch", "ResolutionError", "boundary_fraction", "sample_poly",
    "numeric_moyal", "poly_star_grid", "spectral_derivative", "hermite_functions",
    "hermite_wigner", "oscillator_projector", "relative_l2", "oscillator_exp",
    "SpectralResult", "spectral_fourier", "dump_grid", "load_grid",
]

BOUNDARY_BAND = 0.8     # outer 10% of each half-axis
BOUNDARY_THRESHOLD = 1e-8


class GridMismatch(ValueError):
    pass


class ResolutionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Grid2D:
    N: int
    L: float
    hbar: float
    values: np.ndarray
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.N < 16 or self.N & (self.N - 1):
            raise ValueError("N must be a power of two >= 16")
        if not self.L > 0 or not self.hbar > 0:
            raise ValueError("L and hbar must be positive")
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.N, self.N):
            raise ValueError(f"values must have shape ({self.N}, {self.N})")
        object.__setattr__(self, "values", v)

    @property
    def dx(self) -> float:
        return 2 * self.L / self.N

    @property
    def axis(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.N)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """(P, Q) arrays matching ``values``."""
        return np.meshgrid(self.axis, self.axis, indexing="ij")

    @classmethod
    def from_function(cls, f, N: int, L: float, hbar: float) -> "Grid2D":
        g = cls(N, L, hbar, np.zeros((N, N), complex))
        P, Q = g.mesh()
        return replace(g, values=np.asarray(f(P, Q), dtype=complex) * np.ones((N, N)))

    def like(self, values: np.ndarray, warnings: Iterable[str] = ()) -> "Grid2D":
        return Grid2D(self.N, self.L, self.hbar, values, tuple(warnings))

    def same_grid(self, other: "Grid2D") -> bool:
        return (self.N, self.L, self.hbar) == (other.N, other.L, other.hbar)

    def integral(self) -> complex:
        """Riemann sum of values dp dq / (2 pi hbar)."""
        return complex(self.values.sum() * self.dx ** 2 / (2 * math.pi * self.hbar))

    def value_at(self, p: float, q: float) -> complex:
        """Exact trigonometric interpolation at an arbitrary point."""
        k = 2 * np.pi * np.fft.fftfreq(self.N, d=self.dx)
        c = np.fft.fft2(self.values) / self.N ** 2
        ep = np.exp(1j * k * (p + self.L))
        eq = np.exp(1j * k * (q + self.L))
        return complex(ep @ c @ eq)

    def __add__(self, other: "Grid2D") -> "Grid2D":
        _check_pair(self, other)
        return self.like(self.values + other.values, self.warnings + other.warnings)

    def __sub__(self, other: "Grid2D") -> "Grid2D":
        _check_pair(self, other)
        return self.like(self.values - other.values, self.warnings + other.warnings)

    def scale(self, c: complex) -> "Grid2D":
        return self.like(self.values * c, self.warnings)


def _check_pair(F: Grid2D, G: Grid2D) -> None:
    if not F.same_grid(G):
        raise GridMismatch(f"grids differ: (N, L, hbar) = {(F.N, F.L, F.hbar)} vs {(G.N, G.L, G.hbar)}")


def relative_l2(A: Grid2D | np.ndarray, B: Grid2D | np.ndarray) -> float:
    a = A.values if isinstance(A, Grid2D) else np.asarray(A)
    b = B.values if isinstance(B, Grid2D) else np.asarray(B)
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def boundary_fraction(G: Grid2D, band: float = BOUNDARY_BAND) -> float:
    """Share of sum |values|^2 lying where |p| or |q| exceeds band * L."""
    w = np.abs(G.values) ** 2
    total = w.sum()
    if total == 0:
        return 0.0
    x = np.abs(G.axis) > band * G.L
    outer = x[:, None] | x[None, :]
    return float(w[outer].sum() / total)


def _gate(grids: Iterable[Grid2D], threshold: float) -> list[str]:
    out = []
    for name, g in zip("FG", grids):
        frac = boundary_fraction(g)
        if frac >= threshold:
            out.append(f"boundary mass of {name} is {frac:.3e} (threshold {threshold:.0e}); wraparound may corrupt the result")
    return out


def sample_poly(u: Poly, N: int, L: float, hbar: float, window: float | None = None) -> Grid2D:
    """Sample an ell = 1 polynomial, optionally times exp(-(p^2 + q^2) / (2 window^2))."""
    if u.space != phase_space(1):
        raise ValueError("grids carry a single degree of freedom (ell = 1)")
    g = Grid2D(N, L, hbar, np.zeros((N, N), complex))
    P, Q = g.mesh()
    vals = u.eval_numeric([P, Q], hbar) * np.ones((N, N))
    if window is not None:
        vals = vals * np.exp(-(P ** 2 + Q ** 2) / (2 * window ** 2))
    return g.like(vals)


# ---------------------------------------------------------------- numeric star products
def numeric_moyal(F: Grid2D | Poly, G: Grid2D, threshold: float = BOUNDARY_THRESHOLD) -> Grid2D:
    """F * G on the grid.

    Grid inputs use the twisted-product form

        (F * G)(p, q) = sum_{k, m} F~(k, q - hbar m / 2) G~(m, q + hbar k / 2) e^{i (k + m) p}

    where ``~`` is the Fourier series in p; shifts along q are Fourier phases.
    A polynomial left factor is applied as the terminating differential series
    sum_r nu^r P^r(F, G) / r! with spectral derivatives of G.
    """
    if isinstance(F, Poly):
        return poly_star_grid(F, G, threshold)
    _check_pair(F, G)
    warnings = list(F.warnings + G.warnings) + _gate((F, G), threshold)
    N, h = F.N, F.hbar
    k = 2 * np.pi * np.fft.fftfreq(N, d=F.dx)
    Ft = np.fft.fft(F.values, axis=0) / N      # F~[k, q]
    Gt = np.fft.fft(G.values, axis=0) / N      # G~[m, q]
    Fhat = np.fft.fft(Ft, axis=1)              # for q shifts of F
    shiftG = np.exp(1j * np.outer(k, k) * (h / 2))
    acc = np.zeros((N, N), complex)
    for mi in range(N):
        m = k[mi]
        # F~(k, q - hbar m / 2) for every k
        Fs = np.fft.ifft(Fhat * np.exp(-1j * k[None, :] * (h * m / 2)), axis=1)
        # G~(m, q + hbar k / 2) for every k
        Gm = np.fft.fft(Gt[mi])
        Gs = np.fft.ifft(Gm[None, :] * shiftG, axis=1)
        acc += np.roll(Fs * Gs, mi, axis=0)
    out = np.fft.ifft(acc, axis=0) * N
    return F.like(out, warnings)


def spectral_derivative(G: Grid2D, alpha: tuple[int, int]) -> np.ndarray:
    """d^a/dp^a d^b/dq^b of the grid function via FFT, alpha = (a, b)."""
    k = 2j * np.pi * np.fft.fftfreq(G.N, d=G.dx)
    a, b = alpha
    if a == 0 and b == 0:
        return G.values.copy()
    factor = (k[:, None] ** a) * (k[None, :] ** b)
    if G.N % 2 == 0:
        # the Nyquist mode has no well-defined odd derivative
        if a % 2:
            factor[G.N // 2, :] = 0
        if b % 2:
            factor[:, G.N // 2] = 0
    return np.fft.ifft2(np.fft.fft2(G.values) * factor)


def poly_star_grid(u: Poly, G: Grid2D, threshold: float = BOUNDARY_THRESHOLD) -> Grid2D:
    """u * G for a polynomial u (ell = 1); the series stops at r = deg u."""
    if u.space != phase_space(1):
        raise ValueError("grids carry a single degree of freedom (ell = 1)")
    warnings = list(G.warnings) + _gate((G,), threshold)
    tensor = PoissonTensor.canonical(1)
    P, Q = G.mesh()
    out = u.eval_numeric([P, Q], G.hbar) * G.values
    nu = complex(NU) * G.hbar
    cache: dict = {}
    for r in range(1, max(u.degree(), 0) + 1):
        op = poisson_power_op(tensor, r)
        term = np.zeros_like(G.values)
        for (a1, a2), c in op.terms.items():
            du = u.derive_multi(a1)
            if not du:
                continue
            if a2 not in cache:
                cache[a2] = spectral_derivative(G, a2)
            coeff = (c * du).eval_numeric([P, Q], G.hbar)
            term = term + coeff * cache[a2]
        out = out + term * nu ** r / math.factorial(r)
    return G.like(out, warnings)


# ---------------------------------------------------------------- Wigner symbols of oscillator states
def hermite_functions(nmax: int, x: np.ndarray, hbar: float) -> np.ndarray:
    """psi_0..psi_nmax at x (normalized, frequency 1), by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((nmax + 1,) + x.shape)
    s = x / math.sqrt(hbar)
    out[0] = (math.pi * hbar) ** -0.25 * np.exp(-s ** 2 / 2)
    if nmax >= 1:
        out[1] = math.sqrt(2) * s * out[0]
    for n in range(1, nmax):
        out[n + 1] = math.sqrt(2 / (n + 1)) * s * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def hermite_wigner(n: int, m: int, N: int = 256, L: float = 8.0, hbar: float = 1.0,
                   dy: float = 0.05) -> Grid2D:
    """Weyl symbol of |n><m| by trapezoid quadrature of

        W(p, q) = int psi_n(q + y/2) psi_m(q - y/2) exp(-i p y / hbar) dy.
    """
    if n < 0 or m < 0:
        raise ValueError("levels must be non-negative")
    top = max(n, m)
    # the symbol decays like (4H/hbar)^n / n! exp(-2H/hbar); demand < 1e-8 at the band edge
    x = (BOUNDARY_BAND * L) ** 2 / hbar
    if -x + top * math.log(max(2 * x, 1.0)) - math.lgamma(top + 1) > math.log(1e-8):
        raise ResolutionError(f"L = {L} too small for level {top} at hbar = {hbar}")
    turning = math.sqrt(hbar * (2 * top + 1))
    dx = 2 * L / N
    if math.pi / dx < 2 * turning / hbar + 6 / math.sqrt(hbar):
        raise ResolutionError(f"N = {N} under-resolves level {top}")
    Y = 2 * (turning + 8 * math.sqrt(hbar))
    y = np.arange(-Y, Y + dy / 2, dy)
    g = Grid2D(N, L, hbar, np.zeros((N, N), complex))
    x = g.axis
    plus = hermite_functions(top, x[:, None] + y[None, :] / 2, hbar)[n]
    minus = hermite_functions(top, x[:, None] - y[None, :] / 2, hbar)[m]
    A = plus * minus * dy                                # [iq, y]
    E = np.exp(-1j * np.outer(y, x) / hbar)              # [y, ip]
    W = A @ E                                            # [iq, ip]
    return g.like(W.T)


def oscillator_projector(n: int, N: int = 256, L: float = 8.0, hbar: float = 1.0) -> Grid2D:
    """pi_n = 2 (-1)^n exp(-2H/hbar) L_n(4H/hbar) with H = (p^2 + q^2)/2."""
    if n < 0:
        raise ValueError("n must be non-negative")
    g = Grid2D(N, L, hbar, np.zeros((N, N), complex))
    P, Q = g.mesh()
    H = (P ** 2 + Q ** 2) / 2
    return g.like(2 * (-1) ** n * np.exp(-2 * H / hbar) * eval_laguerre(n, 4 * H / hbar))


# ---------------------------------------------------------------- spectrum from the star exponential
def oscillator_exp(t: np.ndarray, p: float, q: float, hbar: float = 1.0) -> np.ndarray:
    """Closed-form Exp(Ht) of H = (p^2 + q^2)/2 (delta = 1/2, ell = 1), complex t allowed."""
    H = (p * p + q * q) / 2
    half = np.asarray(t) / 2
    return np.exp((2 * H / (1j * hbar)) * np.tan(half)) / np.cos(half)


@dataclass(frozen=True)
class SpectralResult:
    value: complex
    raw: complex
    raw_half: complex
    converged: bool
    disagreement: float


def _coefficient(f, omega: float, eps: float, M: int, window: str, sigma: float) -> complex:
    T = 4 * math.pi
    t = np.arange(M) * (T / M)
    vals = f(t - 1j * eps) * np.exp(1j * omega * t)
    if window == "rect":
        return complex(vals.mean())
    if window == "gauss":
        # a wide Gaussian window folded onto one period; f is T-periodic
        kmax = int(math.ceil(8 * sigma / T)) + 1
        wts = np.zeros(M, complex)
        for kk in range(-kmax, kmax + 1):
            wts += np.exp(1j * omega * kk * T) * np.exp(-((t + kk * T) ** 2) / (2 * sigma ** 2))
        norm = sigma * math.sqrt(2 * math.pi)
        return complex((vals * wts).sum() * (T / M) / norm)
    raise ValueError(f"unknown window {window!r}")


def spectral_fourier(n: int, eps: float, points: Iterable[tuple[float, float]], hbar: float = 1.0,
                     shift: float = 0.0, M: int = 2 ** 18, window: str = "rect", sigma: float = 20.0,
                     tol: float = 1e-4, f=None) -> list[SpectralResult]:
    """Fourier coefficient of Exp(H(t - i eps)) at frequency n + 1/2 + shift, per point.

    The raw coefficient carries a factor exp(-(n + 1/2) eps); Richardson
    extrapolation over (eps, eps/2) removes the first-order part.  Repeating
    with (eps/2, eps/4) gives the convergence flag.
    """
    if not 0 < eps <= 1e-2:
        raise ValueError("eps must lie in (0, 1e-2]")
    omega = n + 0.5 + shift
    out = []
    for p, q in points:
        fn = f if f is not None else (lambda t, p=p, q=q: oscillator_exp(t, p, q, hbar))
        c1 = _coefficient(fn, omega, eps, M, window, sigma)
        c2 = _coefficient(fn, omega, eps / 2, M, window, sigma)
        c4 = _coefficient(fn, omega, eps / 4, M, window, sigma)
        r1 = 2 * c2 - c1
        r2 = 2 * c4 - c2
        dis = abs(r1 - r2)
        out.append(SpectralResult(r1, c1, c2, dis <= tol, dis))
    return out


# ---------------------------------------------------------------- binary dump
_HEADER = struct.Struct("<ddd")


def dump_grid(G: Grid2D, path) -> None:
    """Header (N, L, hbar) as little-endian float64, then row-major (re, im) float64 pairs."""
    data = np.empty((G.N, G.N, 2), dtype="<f8")
    data[..., 0] = G.values.real
    data[..., 1] = G.values.imag
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(float(G.N), float(G.L), float(G.hbar)))
        fh.write(data.tobytes(order="C"))


def load_grid(path) -> Grid2D:
    with open(path, "rb") as fh:
        raw = fh.read()
    N, L, hbar = _HEADER.unpack_from(raw, 0)
    N = int(N)
    arr = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if arr.size != 2 * N * N:
        raise ValueError("grid file is truncated or malformed")
    arr = arr.reshape(N, N, 2)
    return Grid2D(N, L, hbar, arr[..., 0] + 1j * arr[..., 1])
