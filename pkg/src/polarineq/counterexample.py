"""Exact refutation of the naive polar L^2 bound ``||D_a P||_2 <= n|a| ||P||_2``.

For ``P = (1 - iz)^n`` and ``alpha = i*beta`` both sides have closed forms:

    int |D_a P|^2 / 2pi        = n^2 (1 + beta)^2 C(2n-2, n-1)
    n^2 |a|^2 int |P|^2 / 2pi  = n^2 beta^2 C(2n, n)

Everything here is done in Python integers and ``Fraction`` (floats are
converted exactly), so the comparison is free of rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from numbers import Rational
from typing import Optional, Union

import numpy as np

from .families import Named, named_polynomial
from .norms import CircleGrid, lp_mean
from .poly import Polynomial, polar_derivative

__all__ = [
    "threshold_beta",
    "below_threshold",
    "exact_sides",
    "cross_check_quadrature",
    "ExactCounterexampleReport",
    "QuadratureCrossCheck",
    "central_binomial_sum",
]

Number = Union[int, float, Fraction, str]


def _exact(beta: Number) -> Fraction:
    if isinstance(beta, Fraction):
        return beta
    if isinstance(beta, (int, Rational)):
        return Fraction(beta)
    if isinstance(beta, str):
        return Fraction(beta)
    if not math.isfinite(beta):
        raise ValueError("beta must be finite")
    return Fraction(float(beta))  # exact binary value


def threshold_beta(n: int) -> float:
    """``T(n) = (n + sqrt(2n(2n-1))) / (3n - 2)``; the bound fails for ``1 <= beta < T(n)``."""
    if n < 2:
        raise ValueError("threshold needs n >= 2")
    return (n + math.sqrt(2 * n * (2 * n - 1))) / (3 * n - 2)


def below_threshold(n: int, beta: Number) -> bool:
    """Exact test of ``beta < T(n)``.

    ``(3n-2) beta - n < sqrt(2n(2n-1))`` is decided by squaring when the left
    side is non-negative.
    """
    if n < 2:
        raise ValueError("threshold needs n >= 2")
    lhs = (3 * n - 2) * _exact(beta) - n
    if lhs < 0:
        return True
    return lhs * lhs < 2 * n * (2 * n - 1)


def central_binomial_sum(m: int) -> int:
    """``sum_k C(m, k)^2``; equals ``C(2m, m)``."""
    return sum(math.comb(m, k) ** 2 for k in range(m + 1))


@dataclass(frozen=True)
class QuadratureCrossCheck:
    lhs_quadrature: float  # int |D_a P|^2
    rhs_quadrature: float  # n^2 |a|^2 int |P|^2
    lhs_rel_delta: float
    rhs_rel_delta: float
    polar_coeff_delta: float  # vs n (1 - i a)(1 - iz)^{n-1}, relative max-abs
    grid_n: int


@dataclass(frozen=True)
class ExactCounterexampleReport:
    n: int
    beta: Fraction
    lhs_sq_over_2pi: Fraction
    rhs_sq_over_2pi: Fraction
    violates: bool
    threshold: float
    beta_below_threshold: bool
    quadrature: Optional[QuadratureCrossCheck] = field(default=None)

    @property
    def ratio(self) -> float:
        """``lhs / rhs`` of the naive bound (not squared)."""
        return math.sqrt(self.lhs_sq_over_2pi / self.rhs_sq_over_2pi)

    def to_json(self) -> dict:
        def num(x: Fraction):
            return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

        d = {
            "n": self.n,
            "beta": num(self.beta),
            "beta_float": float(self.beta),
            "lhs_sq_over_2pi": num(self.lhs_sq_over_2pi),
            "rhs_sq_over_2pi": num(self.rhs_sq_over_2pi),
            "lhs_sq_over_2pi_float": float(self.lhs_sq_over_2pi),
            "rhs_sq_over_2pi_float": float(self.rhs_sq_over_2pi),
            "violates": self.violates,
            "threshold": self.threshold,
            "beta_below_threshold": self.beta_below_threshold,
        }
        if self.quadrature is not None:
            q = self.quadrature
            d["quadrature"] = {
                "lhs": q.lhs_quadrature, "rhs": q.rhs_quadrature,
                "lhs_rel_delta": q.lhs_rel_delta, "rhs_rel_delta": q.rhs_rel_delta,
                "polar_coeff_delta": q.polar_coeff_delta, "grid_n": q.grid_n,
            }
        return d


def exact_sides(n: int, beta: Number) -> ExactCounterexampleReport:
    if n < 2:
        raise ValueError("counterexample needs n >= 2")
    b = _exact(beta)
    if b <= 0:
        raise ValueError("beta must be positive")
    lhs = n * n * (1 + b) ** 2 * math.comb(2 * n - 2, n - 1)
    rhs = n * n * b * b * math.comb(2 * n, n)
    violates = lhs > rhs
    if violates != (n * (1 + b) ** 2 > 2 * (2 * n - 1) * b * b):
        raise ArithmeticError("binomial sides disagree with the reduced quadratic")
    return ExactCounterexampleReport(
        n=n, beta=b, lhs_sq_over_2pi=Fraction(lhs), rhs_sq_over_2pi=Fraction(rhs),
        violates=violates, threshold=threshold_beta(n),
        beta_below_threshold=below_threshold(n, b))


def cross_check_quadrature(n: int, beta: Number,
                           grid: Optional[CircleGrid] = None) -> QuadratureCrossCheck:
    """Run the generic ``p = 2`` quadrature path on the counterexample family."""
    if not 2 <= n <= 20:
        raise ValueError("quadrature cross-check supports 2 <= n <= 20")
    rep = exact_sides(n, beta)
    bf = float(rep.beta)
    alpha = 1j * bf
    P = named_polynomial(Named.COUNTEREX, n)
    D = polar_derivative(P, alpha)
    grid = grid if grid is not None else CircleGrid(max(64, 4 * n + 1))
    lhs = lp_mean(D, 2.0, grid, adaptive=False) ** 2
    rhs = n * n * bf * bf * lp_mean(P, 2.0, grid, adaptive=False) ** 2
    lhs_exact = 2 * math.pi * float(rep.lhs_sq_over_2pi)
    rhs_exact = 2 * math.pi * float(rep.rhs_sq_over_2pi)
    closed = (n * (1 - 1j * alpha)) * named_polynomial(Named.COUNTEREX, n - 1)
    dc = np.max(np.abs(D.padded() - closed.padded())) / np.max(np.abs(closed.padded()))
    return QuadratureCrossCheck(
        lhs_quadrature=lhs, rhs_quadrature=rhs,
        lhs_rel_delta=abs(lhs - lhs_exact) / lhs_exact,
        rhs_rel_delta=abs(rhs - rhs_exact) / rhs_exact,
        polar_coeff_delta=float(dc), grid_n=grid.N)


def report_with_quadrature(n: int, beta: Number,
                           grid: Optional[CircleGrid] = None) -> ExactCounterexampleReport:
    rep = exact_sides(n, beta)
    if n <= 20:
        rep = replace(rep, quadrature=cross_check_quadrature(n, beta, grid))
    return rep
