"""Registry of the polar-derivative inequalities and a uniform margin checker.

Every entry compares two non-negative numbers ``lhs <= rhs``.  Integral
entries are stated in p-th-root form, e.g. ``(int |D_a P|^p)^(1/p)``, so both
sides are homogeneous of degree one in ``P``.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import norms
from .families import FamilySpec, Named, child_seed, generate
from .norms import CircleGrid
from .poly import (Polynomial, conj_reciprocal, derivative, disk_root_report,
                   evaluate, is_self_inversive, polar_derivative)

__all__ = [
    "Hyp",
    "InequalityDef",
    "REGISTRY",
    "CheckConfig",
    "CheckReport",
    "HypothesisViolation",
    "Subject",
    "check",
    "resolve_id",
    "AlphaPolicy",
    "SuiteItem",
    "SuiteSummary",
    "IdSummary",
    "summarize",
    "is_regression",
    "run_suite",
    "reports_to_csv",
    "reports_from_csv",
    "reports_to_jsonl",
    "CSV_COLUMNS",
]


class Hyp(str, enum.Enum):
    NONVANISHING = "nonvanishing"
    SELF_INVERSIVE = "self_inversive"
    ABS_ALPHA_GE_1 = "abs_alpha_ge_1"
    P0_NONZERO = "p0_nonzero"
    NONE = "none"


class HypothesisViolation(ValueError):
    pass


@dataclass(frozen=True)
class CheckConfig:
    tol: float = 1e-7  # pass iff relative_margin >= -tol
    rtol: float = norms.DEFAULT_RTOL  # grid-doubling target
    grid_n: Optional[int] = None  # starting grid; default max(4096, 8n+1)
    n_max: int = norms.MAX_NODES
    sup_samples: Optional[int] = None
    pointwise_n: int = 4096
    identity_n: int = 1024
    identity_tol: float = 1e-10
    root_tol: float = 1e-9
    self_inversive_tol: float = 1e-9
    p0_perturbation: float = 1e-12
    force: bool = False


@dataclass(frozen=True)
class Side:
    value: float
    grid_n: int = 0
    delta: float = 0.0


class Subject:
    """One polynomial plus memoized derived quantities.

    Shared by all checks on the same polynomial within a trial.
    """

    def __init__(self, P: Polynomial, cfg: CheckConfig = CheckConfig()):
        self.P = P
        self.cfg = cfg
        self.n = P.degree
        self._memo: Dict[tuple, object] = {}

    def _get(self, key, make):
        if key not in self._memo:
            self._memo[key] = make()
        return self._memo[key]

    @property
    def Q(self) -> Polynomial:
        return self._get("Q", lambda: conj_reciprocal(self.P))

    @property
    def dP(self) -> Polynomial:
        return self._get("dP", lambda: derivative(self.P))

    @property
    def dQ(self) -> Polynomial:
        return self._get("dQ", lambda: derivative(self.Q))

    def polar(self, alpha: complex) -> Polynomial:
        return self._get(("DP", alpha), lambda: polar_derivative(self.P, alpha))

    def polar_q(self, alpha: complex) -> Polynomial:
        return self._get(("DQ", alpha), lambda: polar_derivative(self.Q, alpha))

    def grid(self) -> CircleGrid:
        if self.cfg.grid_n is not None:
            return CircleGrid(self.cfg.grid_n)
        return CircleGrid.default_for(self.n)

    def lp(self, tag, poly: Polynomial, p: float) -> Side:
        def make():
            q = norms.lp_mean_report(poly, p, self.grid(), rtol=self.cfg.rtol,
                                     n_max=self.cfg.n_max)
            return Side(q.value, q.N, q.delta)
        return self._get(("lp", tag, p), make)

    def sup(self, tag, poly: Polynomial) -> Side:
        return self._get(("sup", tag), lambda: Side(
            norms.sup_norm(poly, self.cfg.sup_samples)))

    def disk_report(self):
        return self._get("disk", lambda: disk_root_report(self.P, self.cfg.root_tol))

    def self_inversive(self):
        return self._get("selfinv", lambda: is_self_inversive(self.P, self.cfg.self_inversive_tol))


Recipe = Callable[[Subject, Optional[complex], Optional[float]], Side]


@dataclass(frozen=True)
class InequalityDef:
    id: str
    description: str
    hypotheses: frozenset
    needs_alpha: bool
    needs_p: bool
    lhs: Recipe = field(repr=False)
    rhs: Recipe = field(repr=False)
    expected_fail: bool = False


# -- recipes ------------------------------------------------------------------

def _sup_P(s, a, p):
    return s.sup("P", s.P)


def _sup_dP(s, a, p):
    return s.sup("dP", s.dP)


def _sup_DP(s, a, p):
    return s.sup(("DP", a), s.polar(a))


def _lp_P(s, p):
    return s.lp("P", s.P, p)


def _lp_dP(s, a, p):
    return s.lp("dP", s.dP, p)


def _lp_DP(s, a, p):
    return s.lp(("DP", a), s.polar(a), p)


def _scaled(side: Side, factor: float) -> Side:
    return Side(side.value * factor, side.grid_n, side.delta)


def _rhs_sup(factor: Callable[[Subject, Optional[complex]], float]) -> Recipe:
    return lambda s, a, p: _scaled(_sup_P(s, a, p), factor(s, a))


def _rhs_lp(factor: Callable[[Subject, Optional[complex], float], float]) -> Recipe:
    return lambda s, a, p: _scaled(_lp_P(s, p), factor(s, a, p))


def _pointwise(s: Subject, a: complex) -> Tuple[float, float]:
    """``(S, worst)`` with ``S = max|D_a Q|`` and ``worst = max(|D_a P| - |D_a Q|)``."""
    def make():
        z = CircleGrid(s.cfg.pointwise_n).nodes
        dp = np.abs(evaluate(s.polar(a), z))
        dq = np.abs(evaluate(s.polar_q(a), z))
        return float(dq.max()), float(np.max(dp - dq)), float(dp.max())
    return s._get(("pw", a), make)


def _double(s: Subject, tag, A: Polynomial, B: Polynomial, p: float) -> Side:
    def make():
        g = s.grid()
        q = norms.double_mean_report(A, B, p, g, s.cfg.rtol, s.cfg.n_max)
        return Side(q.value ** (1.0 / p), q.N, q.delta)
    return s._get(("dbl", tag, p), make)


def _identity_residual(s: Subject, a, p) -> Side:
    z = CircleGrid(s.cfg.identity_n).nodes
    n = s.n
    P, Q, dP, dQ = s.P, s.Q, s.dP, s.dQ
    rot = z ** (n - 1)
    r1 = n * evaluate(P, z) - z * evaluate(dP, z) - rot * np.conj(evaluate(dQ, z))
    r2 = n * evaluate(Q, z) - z * evaluate(dQ, z) - rot * np.conj(evaluate(dP, z))
    return Side(float(max(np.abs(r1).max(), np.abs(r2).max())), s.cfg.identity_n)


def _identity_bound(s: Subject, a, p) -> Side:
    return Side(s.cfg.identity_tol * max(s.n, 1) * s.P.max_abs_coeff(), s.cfg.identity_n)


_H = Hyp
_REG: List[InequalityDef] = [
    InequalityDef(
        "BERNSTEIN", "Bernstein: max|P'| <= n max|P| on the unit circle",
        frozenset({_H.NONE}), False, False,
        _sup_dP, _rhs_sup(lambda s, a: s.n)),
    InequalityDef(
        "ZYGMUND", "Zygmund: ||P'||_p <= n ||P||_p",
        frozenset({_H.NONE}), False, True,
        _lp_dP, _rhs_lp(lambda s, a, p: s.n)),
    InequalityDef(
        "POLAR_SUP", "Aziz-Shah (k=1): max|D_a P| <= n|a| max|P|, |a| >= 1",
        frozenset({_H.ABS_ALPHA_GE_1}), True, False,
        _sup_DP, _rhs_sup(lambda s, a: s.n * abs(a))),
    InequalityDef(
        "CONJ4", "naive polar Zygmund bound ||D_a P||_p <= n|a| ||P||_p (false in general)",
        frozenset({_H.ABS_ALPHA_GE_1}), True, True,
        _lp_DP, _rhs_lp(lambda s, a, p: s.n * abs(a)), expected_fail=True),
    InequalityDef(
        "THM1", "||D_a P||_p <= n(|a|+1) ||P||_p for every complex a",
        frozenset({_H.NONE}), True, True,
        _lp_DP, _rhs_lp(lambda s, a, p: s.n * (abs(a) + 1))),
    InequalityDef(
        "DEBRUIJN", "de Bruijn: ||P'||_p <= n C_p ||P||_p, P free of zeros in |z|<1",
        frozenset({_H.NONVANISHING}), False, True,
        _lp_dP, _rhs_lp(lambda s, a, p: s.n * norms.cp_constant(p))),
    InequalityDef(
        "ERDOS_LAX", "Erdos-Lax: max|P'| <= (n/2) max|P|, P free of zeros in |z|<1",
        frozenset({_H.NONVANISHING}), False, False,
        _sup_dP, _rhs_sup(lambda s, a: s.n / 2)),
    InequalityDef(
        "AZIZ_POLAR", "max|D_a P| <= (n/2)(|a|+1) max|P|, P free of zeros in |z|<1, |a| >= 1",
        frozenset({_H.NONVANISHING, _H.ABS_ALPHA_GE_1}), True, False,
        _sup_DP, _rhs_sup(lambda s, a: s.n / 2 * (abs(a) + 1))),
    InequalityDef(
        "THM2", "||D_a P||_p <= n(|a|+1) C_p ||P||_p, P free of zeros in |z|<1, |a| >= 1",
        frozenset({_H.NONVANISHING, _H.ABS_ALPHA_GE_1}), True, True,
        _lp_DP, _rhs_lp(lambda s, a, p: s.n * (abs(a) + 1) * norms.cp_constant(p))),
    InequalityDef(
        "THM3", "||D_a P||_p <= n(|a|+1) C_p ||P||_p, P self-inversive, every a",
        frozenset({_H.SELF_INVERSIVE}), True, True,
        _lp_DP, _rhs_lp(lambda s, a, p: s.n * (abs(a) + 1) * norms.cp_constant(p))),
    InequalityDef(
        "LEMMA1_PW", "|D_a P(z)| <= |D_a Q(z)| on |z| = 1, P free of zeros in |z|<1, |a| >= 1",
        frozenset({_H.NONVANISHING, _H.ABS_ALPHA_GE_1}), True, False,
        lambda s, a, p: Side(_pointwise(s, a)[0] + _pointwise(s, a)[1], s.cfg.pointwise_n),
        lambda s, a, p: Side(_pointwise(s, a)[0], s.cfg.pointwise_n)),
    InequalityDef(
        "LEMMA2", "(int int |Q' + e^{ib} P'|^p)^(1/p) <= (2pi)^(1/p) n ||P||_p",
        frozenset({_H.NONE}), False, True,
        lambda s, a, p: _double(s, "L2", s.dQ, s.dP, p),
        _rhs_lp(lambda s, a, p: (2 * math.pi) ** (1 / p) * s.n)),
    InequalityDef(
        "LEMMA3", "(int int |D_a Q + e^{ib} D_a P|^p)^(1/p) <= (2pi)^(1/p) n(|a|+1) ||P||_p, P(0) != 0",
        frozenset({_H.P0_NONZERO}), True, True,
        lambda s, a, p: _double(s, ("L3", a), s.polar_q(a), s.polar(a), p),
        _rhs_lp(lambda s, a, p: (2 * math.pi) ** (1 / p) * s.n * (abs(a) + 1))),
    InequalityDef(
        "ID_18_19", "reflection identities nP - zP' = z^(n-1) conj(Q') and P<->Q, max residual",
        frozenset({_H.NONE}), False, False,
        _identity_residual, _identity_bound),
]

REGISTRY: Dict[str, InequalityDef] = {d.id: d for d in _REG}

_ALIASES = {"LEMMA1": "LEMMA1_PW", "IDENTITIES": "ID_18_19", "ID": "ID_18_19",
            "ERDOS": "ERDOS_LAX", "AZIZ": "AZIZ_POLAR"}


def resolve_id(name: str) -> str:
    key = name.strip().upper().replace("-", "_")
    key = _ALIASES.get(key, key)
    if key not in REGISTRY:
        raise KeyError(f"unknown inequality id {name!r}; known: {', '.join(REGISTRY)}")
    return key


# -- reports ------------------------------------------------------------------

REL_EPS = 1e-300


@dataclass(frozen=True)
class CheckReport:
    id: str
    family: str
    degree: int
    seed: Optional[int]
    alpha: Optional[complex]
    p: Optional[float]  # None for sup-norm entries
    lhs: float
    rhs: float
    margin: float
    relative_margin: float
    passed: bool
    grid_n: int = 0
    delta: float = 0.0
    trial: Optional[int] = None
    expected_fail: bool = False
    note: str = ""

    def to_json(self) -> dict:
        d = asdict(self)
        d["alpha"] = None if self.alpha is None else [self.alpha.real, self.alpha.imag]
        d["pass"] = d.pop("passed")
        d["rel_margin"] = d.pop("relative_margin")
        return d


def _predicted_naive_failure(report_family: str, n: int, alpha, p) -> Optional[bool]:
    """Closed-form verdict of the naive bound on ``(1 - iz)^n`` at ``p = 2``.

    ``int|D_a P|^2 = 2pi n^2 |1 - i a|^2 C(2n-2, n-1)`` and
    ``int|P|^2 = 2pi C(2n, n)``, so the bound fails iff
    ``n |1 - i a|^2 > 2(2n-1) |a|^2``.  Returns ``None`` when too close to call.
    """
    if report_family != Named.COUNTEREX.value or p != 2.0 or alpha is None or n < 2:
        return None
    lhs = n * abs(1 - 1j * alpha) ** 2
    rhs = 2 * (2 * n - 1) * abs(alpha) ** 2
    if abs(lhs - rhs) <= 1e-9 * max(lhs, rhs):
        return None
    return lhs > rhs


def is_regression(r: CheckReport) -> bool:
    """True when a report signals a genuine problem.

    Failures of the expected-fail entry never count; but that entry passing
    where the closed form says it must fail (or vice versa) does.
    """
    if not r.expected_fail:
        return not r.passed
    predicted_fail = _predicted_naive_failure(r.family, r.degree, r.alpha, r.p)
    if predicted_fail is None:
        return False
    return predicted_fail == r.passed


# -- checking -----------------------------------------------------------------

def _hypothesis_notes(defn: InequalityDef, s: Subject, alpha) -> List[str]:
    bad = []
    for h in defn.hypotheses:
        if h is Hyp.NONVANISHING and s.disk_report().inside:
            bad.append("P vanishes in |z|<1")
        elif h is Hyp.SELF_INVERSIVE and s.self_inversive() is None:
            bad.append("P is not self-inversive")
        elif h is Hyp.ABS_ALPHA_GE_1 and alpha is not None and abs(alpha) < 1:
            bad.append("|alpha| < 1")
    return bad


def check(id: str, P, alpha=None, p: Optional[float] = None,
          cfg: CheckConfig = CheckConfig(), *, family: str = "", seed: Optional[int] = None,
          trial: Optional[int] = None, force: Optional[bool] = None) -> CheckReport:
    """Evaluate registry entry ``id`` on ``P`` and report the signed margin.

    ``P`` may be a :class:`Polynomial` or a :class:`Subject` (to share cached
    norms across checks).  Hypothesis violations raise
    :class:`HypothesisViolation` unless ``force`` (or ``cfg.force``) is set.
    """
    defn = REGISTRY[resolve_id(id)]
    force = cfg.force if force is None else force
    s = P if isinstance(P, Subject) else Subject(P, cfg)
    if defn.needs_alpha:
        if alpha is None:
            raise ValueError(f"{defn.id} needs alpha")
        alpha = complex(alpha)
    else:
        alpha = None
    if defn.needs_p:
        if p is None or not math.isfinite(p):
            raise ValueError(f"{defn.id} needs a finite p >= 1")
        p = float(p)
        if p < 1:
            raise ValueError("p must be >= 1")
    else:
        p = None
    if s.n < 1:
        raise ValueError("checks need declared degree >= 1")

    notes = []
    bad = _hypothesis_notes(defn, s, alpha)
    if bad:
        if not force:
            raise HypothesisViolation(f"{defn.id}: " + "; ".join(bad))
        notes.append("forced: " + "; ".join(bad))
    if Hyp.P0_NONZERO in defn.hypotheses and s.P.coeff(0) == 0:
        eps = s.cfg.p0_perturbation * s.P.max_abs_coeff()
        a = s.P.padded()
        a[0] = eps
        s = Subject(Polynomial(a, s.n), s.cfg)
        notes.append(f"a_0 perturbed by {eps!r}")

    lhs = defn.lhs(s, alpha, p)
    rhs = defn.rhs(s, alpha, p)
    margin = rhs.value - lhs.value
    rel = margin / max(rhs.value, REL_EPS)
    return CheckReport(
        id=defn.id, family=family, degree=s.n, seed=seed, alpha=alpha, p=p,
        lhs=lhs.value, rhs=rhs.value, margin=margin, relative_margin=rel,
        passed=rel >= -cfg.tol, grid_n=max(lhs.grid_n, rhs.grid_n),
        delta=max(lhs.delta, rhs.delta), trial=trial,
        expected_fail=defn.expected_fail, note="; ".join(notes))


# -- suites -------------------------------------------------------------------

@dataclass(frozen=True)
class AlphaPolicy:
    fixed: Tuple[complex, ...] = ()
    draws: int = 1
    max_modulus: float = 10.0
    min_modulus: Optional[float] = None  # None: 1 if any id needs |a| >= 1, else 0

    def alphas(self, rng: np.random.Generator, lo_default: float) -> List[complex]:
        lo = lo_default if self.min_modulus is None else self.min_modulus
        out = [complex(a) for a in self.fixed]
        for _ in range(self.draws):
            r = rng.uniform(lo, self.max_modulus)
            out.append(complex(r * np.exp(1j * rng.uniform(0.0, 2 * math.pi))))
        return out


@dataclass(frozen=True)
class SuiteItem:
    family: FamilySpec
    ids: Tuple[str, ...]
    alpha_policy: AlphaPolicy = AlphaPolicy()
    p_values: Tuple[float, ...] = (2.0,)


@dataclass
class IdSummary:
    id: str
    count: int = 0
    failures: int = 0
    regressions: int = 0
    min_relative_margin: float = math.inf
    expected_fail: bool = False


@dataclass
class SuiteSummary:
    by_id: Dict[str, IdSummary]

    @property
    def ok(self) -> bool:
        return all(s.regressions == 0 for s in self.by_id.values())

    def lines(self) -> List[str]:
        out = []
        for s in self.by_id.values():
            tag = " (expected-fail)" if s.expected_fail else ""
            out.append(f"{s.id}{tag}: {s.count} checks, {s.failures} failed, "
                       f"{s.regressions} regressions, min rel margin {s.min_relative_margin:.6g}")
        return out


def summarize(reports: Iterable[CheckReport]) -> SuiteSummary:
    by_id: Dict[str, IdSummary] = {}
    for r in reports:
        s = by_id.setdefault(r.id, IdSummary(r.id, expected_fail=r.expected_fail))
        s.count += 1
        s.failures += not r.passed
        s.regressions += is_regression(r)
        s.min_relative_margin = min(s.min_relative_margin, r.relative_margin)
    return SuiteSummary(by_id)


def _thread_count(threads: Optional[int]) -> int:
    if threads is None:
        threads = int(os.environ.get("POLYINEQ_THREADS", "1") or 1)
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


def _run_trial(item: SuiteItem, ids: Sequence[str], index: int, master_seed: int,
               cfg: CheckConfig) -> List[CheckReport]:
    seed = child_seed(master_seed, index)
    P = generate(item.family, np.random.default_rng(seed))
    s = Subject(P, cfg)
    defs = [REGISTRY[i] for i in ids]
    lo = 1.0 if any(Hyp.ABS_ALPHA_GE_1 in d.hypotheses for d in defs) else 0.0
    alphas = item.alpha_policy.alphas(np.random.default_rng([seed, 1]), lo)
    out = []
    for d in defs:
        for a in (alphas if d.needs_alpha else [None]):
            if (a is not None and Hyp.ABS_ALPHA_GE_1 in d.hypotheses
                    and abs(a) < 1 and not cfg.force):
                continue
            for p in (item.p_values if d.needs_p else [None]):
                out.append(check(d.id, s, a, p, cfg, family=item.family.label,
                                 seed=seed, trial=index))
    return out


def run_suite(items: Sequence[SuiteItem], count: int, master_seed: int,
              cfg: CheckConfig = CheckConfig(),
              threads: Optional[int] = None) -> Tuple[List[CheckReport], SuiteSummary]:
    """Cross product of corpus x ids x alpha draws x p values.

    Trial ``i`` of every item draws its polynomial from
    ``child_seed(master_seed, i)``; reports are merged in (item, trial) order
    whatever the thread count.  ``threads=None`` reads ``POLYINEQ_THREADS``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    reports: List[CheckReport] = []
    workers = _thread_count(threads)
    for item in items:
        ids = [resolve_id(i) for i in item.ids]
        jobs = range(count)
        if workers == 1:
            chunks = [_run_trial(item, ids, i, master_seed, cfg) for i in jobs]
        else:
            with ThreadPoolExecutor(max_workers=workers) as ex:
                chunks = list(ex.map(lambda i: _run_trial(item, ids, i, master_seed, cfg), jobs))
        for c in chunks:
            reports.extend(c)
    return reports, summarize(reports)


# -- serialization --------------------------------------------------------------

CSV_COLUMNS = ["id", "family", "degree", "seed", "alpha_re", "alpha_im", "p", "lhs", "rhs",
               "rel_margin", "pass", "margin", "grid_n", "delta", "trial",
               "expected_fail", "note"]


def _f(x: float) -> str:
    return repr(float(x))


def report_row(r: CheckReport) -> List[str]:
    return [
        r.id, r.family, str(r.degree), "" if r.seed is None else str(r.seed),
        "" if r.alpha is None else _f(r.alpha.real),
        "" if r.alpha is None else _f(r.alpha.imag),
        "sup" if r.p is None else _f(r.p),
        _f(r.lhs), _f(r.rhs), _f(r.relative_margin), "true" if r.passed else "false",
        _f(r.margin), str(r.grid_n), _f(r.delta),
        "" if r.trial is None else str(r.trial),
        "true" if r.expected_fail else "false", r.note,
    ]


def reports_to_csv(reports: Iterable[CheckReport], fh=None) -> Optional[str]:
    buf = fh if fh is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow(report_row(r))
    return None if fh is not None else buf.getvalue()


def reports_from_csv(text: str) -> List[CheckReport]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        alpha = None if row["alpha_re"] == "" else complex(float(row["alpha_re"]),
                                                          float(row["alpha_im"]))
        out.append(CheckReport(
            id=row["id"], family=row["family"], degree=int(row["degree"]),
            seed=None if row["seed"] == "" else int(row["seed"]), alpha=alpha,
            p=None if row["p"] == "sup" else float(row["p"]),
            lhs=float(row["lhs"]), rhs=float(row["rhs"]), margin=float(row["margin"]),
            relative_margin=float(row["rel_margin"]), passed=row["pass"] == "true",
            grid_n=int(row["grid_n"]), delta=float(row["delta"]),
            trial=None if row["trial"] == "" else int(row["trial"]),
            expected_fail=row["expected_fail"] == "true", note=row["note"]))
    return out



def reports_to_jsonl(reports: Iterable[CheckReport]) -> str:
    lines = []
    for r in reports:
        d = r.to_json()
        for k in ("delta",):
            if not math.isfinite(d[k]):
                d[k] = repr(d[k])
        lines.append(json.dumps(d, sort_keys=False))
    return "\n".join(lines) + ("\n" if lines else "")
