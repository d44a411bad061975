"""Simplex search for polynomials that make an inequality tight.

The objective is the ratio ``lhs / rhs`` of a registry entry, maximized by
Nelder-Mead with seeded random restarts.  Hypotheses are enforced by the
parametrization (roots pushed outside the disk, mirrored coefficients), not
by penalties.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from .families import Named, named_polynomial
from .inequalities import (REGISTRY, CheckConfig, CheckReport, Hyp, Subject, check,
                           resolve_id)
from .poly import Polynomial, from_roots

__all__ = [
    "Param",
    "SearchConfig",
    "RestartTrace",
    "SearchResult",
    "sharpness_search",
    "verify_extremal",
    "trace_to_csv",
    "decode",
]


class Param(str, enum.Enum):
    RAW_COEFFS = "raw"
    ROOTS_OUTSIDE = "roots_outside"
    SELF_INV_HALF = "self_inv_half"


def _default_objective_cfg() -> CheckConfig:
    return CheckConfig(grid_n=512, rtol=1e-9, sup_samples=256)


@dataclass(frozen=True)
class SearchConfig:
    inequality: str
    degree: int
    p: Optional[float] = None
    alpha: Optional[complex] = None  # None: optimized (|alpha| >= 1 if required)
    parametrization: Param = Param.RAW_COEFFS
    restarts: int = 10
    max_iter: int = 2000
    xatol: float = 1e-10
    fatol: float = 1e-13
    target: Optional[float] = None  # stop restarting once this ratio is reached
    objective_cfg: CheckConfig = field(default_factory=_default_objective_cfg)

    def __post_init__(self):
        object.__setattr__(self, "inequality", resolve_id(self.inequality))
        object.__setattr__(self, "parametrization", Param(self.parametrization))
        d = REGISTRY[self.inequality]
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        if d.needs_p and (self.p is None or self.p < 1):
            raise ValueError(f"{d.id} needs p >= 1")
        if Hyp.NONVANISHING in d.hypotheses and self.parametrization is not Param.ROOTS_OUTSIDE:
            raise ValueError(f"{d.id} needs the roots_outside parametrization")
        if Hyp.SELF_INVERSIVE in d.hypotheses and self.parametrization is not Param.SELF_INV_HALF:
            raise ValueError(f"{d.id} needs the self_inv_half parametrization")
        if (self.alpha is not None and Hyp.ABS_ALPHA_GE_1 in d.hypotheses
                and abs(self.alpha) < 1):
            raise ValueError(f"{d.id} needs |alpha| >= 1")
        if self.restarts < 1 or self.max_iter < 1:
            raise ValueError("restarts and max_iter must be >= 1")

    @property
    def optimize_alpha(self) -> bool:
        return REGISTRY[self.inequality].needs_alpha and self.alpha is None


@dataclass(frozen=True)
class RestartTrace:
    restart: int
    ratio: float
    best_so_far: float
    nfev: int
    nit: int


@dataclass(frozen=True)
class SearchResult:
    polynomial: Polynomial
    alpha: Optional[complex]
    ratio: float
    trace: Tuple[RestartTrace, ...]
    report: CheckReport  # best polynomial re-checked at full accuracy


def _softplus(t):
    return np.logaddexp(0.0, t)


def _poly_dim(param: Param, n: int) -> int:
    if param is Param.RAW_COEFFS:
        return 2 * (n + 1)
    if param is Param.ROOTS_OUTSIDE:
        return 2 * n
    half = (n + 1) // 2
    return 2 * half + 1 + (n % 2 == 0)


def decode(param: Param, n: int, x: np.ndarray) -> Polynomial:
    """Map a parameter vector to a polynomial of declared degree ``n``.

    Trailing entries beyond the polynomial block (alpha parameters) are ignored.
    """
    if param is Param.RAW_COEFFS:
        return Polynomial(x[: n + 1] + 1j * x[n + 1:2 * n + 2], n)
    if param is Param.ROOTS_OUTSIDE:
        radii = 1.0 + _softplus(x[:n])
        return from_roots(radii * np.exp(1j * x[n:2 * n]), 1.0)
    half = (n + 1) // 2
    free = x[:half] + 1j * x[half:2 * half]
    phi = x[2 * half]
    u = np.exp(1j * phi)
    c = np.zeros(n + 1, dtype=complex)
    c[:half] = free
    c[n - half + 1:] = u * np.conj(free[::-1])
    if n % 2 == 0:
        c[n // 2] = x[2 * half + 1] * np.exp(0.5j * phi)
    return Polynomial(c, n)


def _decode_alpha(cfg: SearchConfig, x: np.ndarray) -> Optional[complex]:
    if not REGISTRY[cfg.inequality].needs_alpha:
        return None
    if not cfg.optimize_alpha:
        return complex(cfg.alpha)
    s, psi = x[-2], x[-1]
    if Hyp.ABS_ALPHA_GE_1 in REGISTRY[cfg.inequality].hypotheses:
        return complex((1.0 + _softplus(s)) * np.exp(1j * psi))
    return complex(s, psi)


def _ratio(cfg: SearchConfig, P: Polynomial, alpha) -> float:
    if P.is_zero():
        return 0.0
    d = REGISTRY[cfg.inequality]
    s = Subject(P, cfg.objective_cfg)
    p = cfg.p if d.needs_p else None
    rhs = d.rhs(s, alpha, p).value
    if rhs <= 0:
        return 0.0
    return d.lhs(s, alpha, p).value / rhs


def sharpness_search(cfg: SearchConfig, master_seed: int = 0) -> SearchResult:
    """Maximize ``lhs/rhs`` over the parametrized family.

    Restart ``r`` starts from a point drawn with
    ``SeedSequence(master_seed, spawn_key=(r,))``; the best restart wins,
    earliest index on ties.  Non-convergence just returns the best so far.
    """
    n = cfg.degree
    dim = _poly_dim(cfg.parametrization, n) + (2 if cfg.optimize_alpha else 0)

    def objective(x):
        try:
            val = _ratio(cfg, decode(cfg.parametrization, n, x), _decode_alpha(cfg, x))
        except (ValueError, FloatingPointError, OverflowError):
            return 0.0
        return -val if math.isfinite(val) else 0.0

    best_x, best = None, -math.inf
    trace: List[RestartTrace] = []
    for r in range(cfg.restarts):
        rng = np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(r,)))
        x0 = rng.standard_normal(dim)
        if cfg.parametrization is Param.ROOTS_OUTSIDE:
            x0[n:2 * n] = rng.uniform(0.0, 2 * math.pi, n)
        res = minimize(objective, x0, method="Nelder-Mead",
                       options=dict(maxiter=cfg.max_iter, maxfev=4 * cfg.max_iter,
                                    xatol=cfg.xatol, fatol=cfg.fatol, adaptive=dim > 6))
        val = -float(res.fun)
        if val > best:
            best, best_x = val, np.array(res.x)
        trace.append(RestartTrace(r, val, best, int(res.nfev), int(res.nit)))
        if cfg.target is not None and best >= cfg.target:
            break

    P = decode(cfg.parametrization, n, best_x)
    alpha = _decode_alpha(cfg, best_x)
    d = REGISTRY[cfg.inequality]
    report = check(d.id, P, alpha, cfg.p if d.needs_p else None, CheckConfig(),
                   family=f"search:{cfg.parametrization.value}", seed=master_seed)
    ratio = report.lhs / report.rhs if report.rhs > 0 else 0.0
    return SearchResult(P, alpha, ratio, tuple(trace), report)


def trace_to_csv(trace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["restart", "ratio", "best_so_far", "nfev", "nit"])
    for t in trace:
        w.writerow([t.restart, repr(t.ratio), repr(t.best_so_far), t.nfev, t.nit])
    return buf.getvalue()


# Closed-form equality cases per entry.
EXTREMAL_FAMILIES = {
    "BERNSTEIN": {Named.MONOMIAL},
    "ZYGMUND": {Named.MONOMIAL},
    "POLAR_SUP": {Named.MONOMIAL},
    "LEMMA2": {Named.MONOMIAL},
    "DEBRUIJN": {Named.BINOMIAL, Named.PLUS_ONE},
    "ERDOS_LAX": {Named.BINOMIAL, Named.PLUS_ONE},
    "AZIZ_POLAR": {Named.BINOMIAL, Named.PLUS_ONE},
}


def verify_extremal(inequality: str, family, n: int, p: Optional[float] = None,
                    alpha=None, a: complex = 1.0, b: complex = 1.0,
                    cfg: CheckConfig = CheckConfig()) -> CheckReport:
    """Run :func:`check` on the closed-form extremal polynomial of ``family``."""
    ident = resolve_id(inequality)
    family = Named(family)
    if family not in EXTREMAL_FAMILIES.get(ident, set()):
        raise ValueError(f"{family.value} is not an equality case of {ident}")
    if family is Named.BINOMIAL and not math.isclose(abs(complex(a)), abs(complex(b)),
                                                   rel_tol=1e-15):
        raise ValueError("binomial equality case needs |a| = |b|")
    P = named_polynomial(family, n, a, b)
    return check(ident, P, alpha, p, cfg, family=family.value)
