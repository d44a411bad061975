"""Integral means and sup norms on the unit circle.

All integrals are taken over ``[0, 2*pi)`` *without* the ``1/(2*pi)``
normalization, except inside :func:`cp_constant`, which carries it by
definition.  Quadrature is the periodic trapezoid rule on uniform grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.special import hyp2f1

from .poly import Polynomial, evaluate

__all__ = [
    "CircleGrid",
    "Quadrature",
    "SUP",
    "lp_integral",
    "lp_mean",
    "lp_mean_report",
    "sup_norm",
    "cp_constant",
    "cp_gamma_oracle",
    "two_term_beta_mean",
    "two_term_beta_mean_radial",
    "lemma_double_mean",
    "double_mean_report",
    "DEFAULT_RTOL",
    "MAX_NODES",
]

TWO_PI = 2.0 * math.pi
DEFAULT_RTOL = 1e-8
MAX_NODES = 2 ** 20
CP_NODES = 2 ** 20

# Marker for the p = infinity exponent (sup norm).
SUP = math.inf


@dataclass(frozen=True)
class CircleGrid:
    """``N`` uniform nodes ``2*pi*j/N`` with weight ``2*pi/N`` each."""

    N: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 8:
            raise ValueError(f"grid needs an integer N >= 8, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))

    @classmethod
    def default_for(cls, degree: int) -> "CircleGrid":
        return cls(max(4096, 8 * degree + 1))

    @property
    def weight(self) -> float:
        return TWO_PI / self.N

    @property
    def thetas(self) -> np.ndarray:
        return TWO_PI * np.arange(self.N) / self.N

    @property
    def nodes(self) -> np.ndarray:
        return np.exp(1j * self.thetas)

    def exact_for(self, degree: int, p: float) -> bool:
        """Trapezoid exactness for ``|P|^p`` with ``p`` an even integer.

        ``|P|^p`` is then a trigonometric polynomial of degree ``p*n/2``;
        requiring ``N >= p*n + 1`` keeps a safety factor of two.
        """
        return _is_even_int(p) and self.N >= int(p) * degree + 1


@dataclass(frozen=True)
class Quadrature:
    value: float
    N: int
    delta: float  # relative change at the last doubling; 0.0 when exact
    exact: bool = False
    converged: bool = True
    warning: Optional[str] = None


def _is_even_int(p: float) -> bool:
    return math.isfinite(p) and float(p).is_integer() and int(p) % 2 == 0


def _check_p(p: float) -> float:
    p = float(p)
    if not p >= 1.0:
        raise ValueError(f"exponent p must be >= 1, got {p!r}")
    return p


def _doubling(integrand: Callable[[np.ndarray], np.ndarray], N0: int,
              rtol: float, n_max: int) -> Quadrature:
    """Trapezoid sums on N0, 2*N0, ... until the relative change is <= rtol.

    Each doubling evaluates only the new (odd) nodes.
    """
    N = N0
    total = float(np.sum(integrand(TWO_PI * np.arange(N) / N)))
    value = total * TWO_PI / N
    delta = math.inf
    while 2 * N <= n_max:
        odd = TWO_PI * (2 * np.arange(N) + 1) / (2 * N)
        total += float(np.sum(integrand(odd)))
        N *= 2
        new = total * TWO_PI / N
        delta = abs(new - value) / abs(new) if new != 0 else abs(new - value)
        value = new
        if delta <= rtol:
            return Quadrature(value, N, delta)
    return Quadrature(value, N, delta, converged=delta <= rtol,
                      warning=None if delta <= rtol else
                      f"doubling stopped at N={N} with relative delta {delta:.3e}")


def _grid_for(P: Polynomial, grid: Optional[CircleGrid]) -> CircleGrid:
    return grid if grid is not None else CircleGrid.default_for(P.degree)


def lp_integral(P: Polynomial, p: float, grid: Optional[CircleGrid] = None,
                *, adaptive: bool = True, rtol: float = DEFAULT_RTOL,
                n_max: int = MAX_NODES) -> tuple[float, Quadrature]:
    """``(M, Q)`` with ``integral |P|^p = M**p * Q.value``.

    The integrand is rescaled by the coarse-grid maximum ``M`` so large
    exponents do not overflow.
    """
    p = _check_p(p)
    grid = _grid_for(P, grid)
    vals = np.abs(evaluate(P, grid.nodes))
    M = float(vals.max())
    if M == 0.0:
        return 0.0, Quadrature(0.0, grid.N, 0.0, exact=True)
    exact = grid.exact_for(P.degree, p)
    if exact or not adaptive:
        q = Quadrature(float(np.sum((vals / M) ** p)) * grid.weight, grid.N, 0.0,
                       exact=exact,
                       warning=None if exact else
                       f"N={grid.N} is not exact for p={p:g}, degree {P.degree}")
        return M, q

    def integrand(th):
        return (np.abs(evaluate(P, np.exp(1j * th))) / M) ** p

    return M, _doubling(integrand, grid.N, rtol, n_max)


def lp_mean_report(P: Polynomial, p: float, grid: Optional[CircleGrid] = None,
                   **kw) -> Quadrature:
    """Like :func:`lp_mean` but keeps grid size, delta and exactness flags."""
    M, q = lp_integral(P, p, grid, **kw)
    p = float(p)
    return Quadrature(M * q.value ** (1.0 / p), q.N, q.delta, q.exact,
                      q.converged, q.warning)


def lp_mean(P: Polynomial, p: float, grid: Optional[CircleGrid] = None,
            **kw) -> float:
    """``(integral_0^{2pi} |P(e^{it})|^p dt)^{1/p}``."""
    return lp_mean_report(P, p, grid, **kw).value


def _golden_max(f, lo: float, hi: float, xtol: float) -> tuple[float, float]:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def sup_norm(P: Polynomial, samples: Optional[int] = None,
             refine_tol: float = 1e-12, candidates: int = 3) -> float:
    """``max |P(z)|`` over ``|z| = 1``.

    Uniform sampling locates the largest few local maxima of ``|P|^2``;
    golden-section search then refines each inside its bracketing cell.
    The result never exceeds the true maximum (it is a value of ``|P|``),
    and for unit-scale inputs sits within ``refine_tol`` relative of it.
    """
    if samples is None:
        samples = max(1024, 32 * (P.degree + 1))
    if samples < 64:
        raise ValueError("sup_norm needs at least 64 samples")
    if P.numeric_degree == 0:
        return abs(P.coeff(0))
    th = TWO_PI * np.arange(samples) / samples
    f = np.abs(evaluate(P, np.exp(1j * th))) ** 2
    is_peak = (f >= np.roll(f, 1)) & (f >= np.roll(f, -1))
    peaks = np.flatnonzero(is_peak)
    peaks = peaks[np.argsort(-f[peaks], kind="stable")][:candidates]
    h = TWO_PI / samples
    best = float(f.max())
    xtol = h * math.sqrt(refine_tol)

    def g(t):
        return abs(evaluate(P, complex(math.cos(t), math.sin(t)))) ** 2

    for j in peaks:
        _, val = _golden_max(g, th[j] - h, th[j] + h, xtol)
        best = max(best, val)
    return math.sqrt(best)


def cp_gamma_oracle(p: float) -> float:
    """``C_p`` from the closed-form mean ``2^p G((p+1)/2) / (sqrt(pi) G(p/2+1))``."""
    p = _check_p(p)
    log_mean = (p * math.log(2.0) + math.lgamma((p + 1) / 2)
                - 0.5 * math.log(math.pi) - math.lgamma(p / 2 + 1))
    return math.exp(-log_mean / p)


@lru_cache(maxsize=256)
def _cp_cached(p: float, N: int) -> float:
    beta = TWO_PI * np.arange(N) / N
    # |1 + e^{ib}| = |2 cos(b/2)|; avoids cancellation in 2 + 2 cos b near b = pi
    mean = float(np.sum(np.abs(2.0 * np.cos(beta / 2.0)) ** p)) / N
    return mean ** (-1.0 / p)


def cp_constant(p: float, grid: Optional[CircleGrid] = None) -> float:
    """``C_p = {(1/2pi) int |1 + e^{ib}|^p db}^{-1/p}`` by trapezoid quadrature.

    The cusp of the integrand at ``b = pi`` sits on a node (N even), so the
    error decays like ``N^{-(p+1)}``; the default ``2**20`` nodes put it far
    below 1e-10.
    """
    p = _check_p(p)
    N = grid.N if grid is not None else CP_NODES
    return _cp_cached(p, N)


def two_term_beta_mean(a, b, p: float, grid: Optional[CircleGrid] = None) -> float:
    """``int_0^{2pi} |a + b e^{ib}|^p db`` by trapezoid quadrature.

    Only ``|a|``, ``|b|`` matter, so the phases are rotated away and the
    possible cusp lands on the node ``b = pi``.  The default grid matches the
    one used for ``C_p``, which is the same integrand at ``|a| = |b|``.
    """
    p = _check_p(p)
    grid = grid if grid is not None else CircleGrid(CP_NODES)
    ra, rb = abs(complex(a)), abs(complex(b))
    vals = np.abs(ra + rb * grid.nodes) ** p
    return float(np.sum(vals)) * grid.weight


def two_term_beta_mean_radial(a, b, p: float):
    """Closed form of :func:`two_term_beta_mean`, vectorized over ``a``, ``b``.

    With ``R = max(|a|,|b|)`` and ``rho = min/max``, the mean equals
    ``2 pi R^p 2F1(-p/2, -p/2; 1; rho^2)`` (binomial series of
    ``(1 + rho e^{ib})^{p/2} (1 + rho e^{-ib})^{p/2}``).
    """
    p = _check_p(p)
    ra, rb = np.abs(np.asarray(a, dtype=complex)), np.abs(np.asarray(b, dtype=complex))
    R = np.maximum(ra, rb)
    r = np.minimum(ra, rb)
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = np.where(R > 0, r / np.where(R > 0, R, 1.0), 0.0)
    out = TWO_PI * R ** p * hyp2f1(-p / 2, -p / 2, 1.0, rho ** 2)
    return float(out) if np.ndim(out) == 0 else out


def lemma_double_mean(A, B, p: float, grid_theta: CircleGrid,
                      grid_beta: Optional[CircleGrid] = None) -> float:
    """``int int |A(t) + e^{ib} B(t)|^p dt db`` for samples ``A, B`` on ``grid_theta``.

    With ``grid_beta`` the inner integral is a trapezoid sum; without it the
    radial closed form :func:`two_term_beta_mean_radial` is used.
    """
    p = _check_p(p)
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.shape != (grid_theta.N,) or B.shape != (grid_theta.N,):
        raise ValueError("A and B must be sampled on grid_theta")
    if grid_beta is None:
        inner = two_term_beta_mean_radial(A, B, p)
    else:
        e = grid_beta.nodes
        inner = np.empty(grid_theta.N)
        ra, rb = np.abs(A), np.abs(B)
        for s in range(0, grid_theta.N, 512):
            blk = np.abs(ra[s:s + 512, None] + rb[s:s + 512, None] * e[None, :]) ** p
            inner[s:s + 512] = blk.sum(axis=1) * grid_beta.weight
    return float(np.sum(inner)) * grid_theta.weight


def double_mean_report(A: Polynomial, B: Polynomial, p: float,
                       grid: Optional[CircleGrid] = None,
                       rtol: float = DEFAULT_RTOL,
                       n_max: int = MAX_NODES) -> Quadrature:
    """:func:`lemma_double_mean` for polynomial ``A``, ``B`` with grid doubling.

    The returned value is the double integral itself (not its p-th root).
    """
    p = _check_p(p)
    degree = max(A.degree, B.degree, 1)
    grid = grid if grid is not None else CircleGrid.default_for(degree)
    z = grid.nodes
    M = float(np.max(np.abs(evaluate(A, z)) + np.abs(evaluate(B, z))))
    if M == 0.0:
        return Quadrature(0.0, grid.N, 0.0, exact=True)

    def integrand(th):
        zz = np.exp(1j * th)
        return two_term_beta_mean_radial(evaluate(A, zz) / M, evaluate(B, zz) / M, p)

    q = _doubling(integrand, grid.N, rtol, n_max)
    return Quadrature(q.value * M ** p, q.N, q.delta, q.exact, q.converged, q.warning)
