"""Command-line entry point.

Exit codes: 0 when every check that is not an expected failure passed,
1 when a genuine violation was found, 2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

from . import counterexample as cx
from . import norms
from .extremal import Param, SearchConfig, sharpness_search, trace_to_csv
from .families import PRESETS, FamilySpec, child_seed, generate
from .inequalities import (CSV_COLUMNS, REGISTRY, AlphaPolicy, CheckConfig, Hyp,
                           SuiteItem, reports_to_csv, reports_to_jsonl, resolve_id,
                           run_suite)
from .poly import Polynomial, poly_from_json, poly_to_json

COMMANDS = ("verify", "counterexample", "constants", "norms", "search")


class UsageError(Exception):
    """Bad flags or input files; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    families: Tuple[FamilySpec, ...] = ()
    ids: Tuple[str, ...] = ()
    p_values: Tuple[float, ...] = (2.0,)
    alpha_policy: AlphaPolicy = AlphaPolicy()
    trials: int = 1
    seed: Optional[int] = None
    grid_n: Optional[int] = None
    tol: float = 1e-7
    out: Optional[str] = None
    format: str = "csv"
    force: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        try:
            object.__setattr__(self, "ids", tuple(resolve_id(i) for i in self.ids))
        except KeyError as e:
            raise UsageError(str(e.args[0])) from None
        if self.trials < 1:
            raise UsageError("--trials must be >= 1")
        if self.command in ("verify", "search") and self.seed is None:
            raise UsageError(f"{self.command} needs an explicit --seed")
        if self.format not in ("json", "csv", "table"):
            raise UsageError(f"unknown format {self.format!r}")


def load_polynomial(path) -> Polynomial:
    """Read the polynomial JSON schema; errors carry line/column when known."""
    text = Path(path).read_text()
    try:
        obj = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    except ValueError as e:
        raise UsageError(f"{path}: {e}") from None
    try:
        return poly_from_json(obj)
    except ValueError as e:
        raise UsageError(f"{path}: {e}") from None


def _reject_constant(name):
    raise ValueError(f"non-finite number {name} is not allowed")


def save_polynomial(P: Polynomial, path) -> None:
    Path(path).write_text(json.dumps(poly_to_json(P)) + "\n")


# -- parsing helpers -------------------------------------------------------------

def _floats(text: str) -> Tuple[float, ...]:
    try:
        vals = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise UsageError(f"expected finite numbers, got {text!r}")
    return vals


def _complex(text: str) -> complex:
    parts = _floats(text)
    if len(parts) == 1:
        return complex(parts[0], 0.0)
    if len(parts) != 2:
        raise UsageError(f"alpha must be RE,IM, got {text!r}")
    return complex(*parts)


def _degrees(text: str) -> Tuple[int, Optional[int]]:
    try:
        if "-" in text:
            lo, hi = text.split("-", 1)
            return int(lo), int(hi)
        return int(text), None
    except ValueError:
        raise UsageError(f"--degree must be N or LO-HI, got {text!r}") from None


def _family(args) -> FamilySpec:
    name = args.family.lower()
    if name not in PRESETS:
        raise UsageError(f"unknown family {args.family!r}; choose from {sorted(PRESETS)}")
    lo, hi = _degrees(args.degree)
    try:
        return FamilySpec(degree=lo, max_degree=hi, seed=args.seed or 0,
                          rmax=args.rmax, **PRESETS[name])
    except ValueError as e:
        raise UsageError(str(e)) from None


def _sig(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [list(header)] + [[_sig(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- commands ----------------------------------------------------------------------

def cmd_verify(args) -> int:
    if not args.ids:
        raise UsageError("verify needs --ids")
    ids = tuple(i for i in args.ids.split(",") if i.strip())
    fixed = tuple(_complex(a) for a in (args.alpha or []))
    policy = AlphaPolicy(fixed=fixed, draws=0 if fixed else args.alpha_draws,
                         max_modulus=args.alpha_max, min_modulus=args.alpha_min)
    rc = RunConfig("verify", families=(_family(args),), ids=ids,
                   p_values=_floats(args.p) if args.p else (2.0,),
                   alpha_policy=policy, trials=args.trials, seed=args.seed,
                   grid_n=args.grid_n, tol=args.tol, out=args.out,
                   format=args.format or "csv", force=args.force_hypothesis)
    if any(p < 1 for p in rc.p_values):
        raise UsageError("--p values must be >= 1")
    cfg = CheckConfig(tol=rc.tol, grid_n=rc.grid_n, force=rc.force)
    item = SuiteItem(rc.families[0], rc.ids, rc.alpha_policy, rc.p_values)
    try:
        reports, summary = run_suite([item], rc.trials, rc.seed, cfg)
    except ValueError as e:  # hypothesis violations included
        raise UsageError(str(e)) from None
    if rc.format == "csv":
        text = reports_to_csv(reports)
    elif rc.format == "json":
        text = reports_to_jsonl(reports)
    else:
        text = _table(CSV_COLUMNS[:11], [
            [r.id, r.family, r.degree, r.seed,
             None if r.alpha is None else r.alpha.real,
             None if r.alpha is None else r.alpha.imag,
             "sup" if r.p is None else r.p, r.lhs, r.rhs, r.relative_margin,
             "pass" if r.passed else "FAIL"] for r in reports])
    _emit(text, rc.out)
    for line in summary.lines():
        print(line, file=sys.stderr)
    return 0 if summary.ok else 1


def cmd_counterexample(args) -> int:
    try:
        beta = Fraction(args.beta)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--beta must be a decimal or fraction, got {args.beta!r}") from None
    if args.n < 2 or beta <= 0:
        raise UsageError("need --n >= 2 and --beta > 0")
    rep = cx.report_with_quadrature(args.n, beta)
    fmt = args.format or "json"
    table = _table(["quantity", "value"], [
        ["n", rep.n], ["beta", str(rep.beta)],
        ["int|D_a P|^2 / 2pi", str(rep.lhs_sq_over_2pi)],
        ["n^2|a|^2 int|P|^2 / 2pi", str(rep.rhs_sq_over_2pi)],
        ["naive bound violated", rep.violates],
        ["threshold T(n)", rep.threshold],
        ["beta < T(n)", rep.beta_below_threshold],
    ] + ([] if rep.quadrature is None else [
        ["quadrature lhs rel delta", rep.quadrature.lhs_rel_delta],
        ["quadrature rhs rel delta", rep.quadrature.rhs_rel_delta],
    ]))
    if fmt == "table":
        _emit(table, args.out)
    else:
        _emit(json.dumps(rep.to_json(), indent=2) + "\n", args.out)
        if not args.out:
            sys.stderr.write(table)
    ok = rep.quadrature is None or (rep.quadrature.lhs_rel_delta <= 1e-9
                                    and rep.quadrature.rhs_rel_delta <= 1e-9)
    if rep.beta >= 1:
        ok = ok and rep.violates == rep.beta_below_threshold
    return 0 if ok else 1


def cmd_constants(args) -> int:
    ps = _floats(args.p) if args.p else (1.0, 2.0, 4.0)
    if any(p < 1 for p in ps):
        raise UsageError("--p values must be >= 1")
    grid = norms.CircleGrid(args.grid_n) if args.grid_n else None
    rows = []
    for p in ps:
        q = norms.cp_constant(p, grid)
        o = norms.cp_gamma_oracle(p)
        rows.append({"p": p, "C_p": q, "C_p_gamma": o, "abs_delta": abs(q - o)})
    fmt = args.format or "table"
    if fmt == "json":
        text = json.dumps(rows, indent=2) + "\n"
    elif fmt == "csv":
        text = "p,C_p,C_p_gamma,abs_delta\n" + "".join(
            f"{r['p']!r},{r['C_p']!r},{r['C_p_gamma']!r},{r['abs_delta']!r}\n" for r in rows)
    else:
        text = _table(["p", "C_p", "C_p (Gamma oracle)", "abs delta"],
                      [[r["p"], r["C_p"], r["C_p_gamma"], r["abs_delta"]] for r in rows])
    _emit(text, args.out)
    return 0


def cmd_norms(args) -> int:
    if args.poly:
        P = load_polynomial(args.poly)
    elif args.family:
        if args.seed is None:
            raise UsageError("norms with --family needs --seed")
        spec = _family(args)
        P = generate(spec, np.random.default_rng(child_seed(args.seed, 0)))
    else:
        raise UsageError("norms needs --poly FILE or --family")
    ps = _floats(args.p) if args.p else (1.0, 2.0)
    grid = norms.CircleGrid(args.grid_n) if args.grid_n else None
    rows = []
    for p in ps:
        if p < 1:
            raise UsageError("--p values must be >= 1")
        q = norms.lp_mean_report(P, p, grid)
        rows.append({"p": p, "value": q.value, "grid_n": q.N, "delta": q.delta,
                     "exact": q.exact})
    sup = norms.sup_norm(P)
    fmt = args.format or "table"
    if fmt == "json":
        text = json.dumps({"polynomial": poly_to_json(P), "lp": rows, "sup": sup},
                          indent=2) + "\n"
    elif fmt == "csv":
        text = "p,value,grid_n,delta,exact\n" + "".join(
            f"{r['p']!r},{r['value']!r},{r['grid_n']},{r['delta']!r},{r['exact']}\n"
            for r in rows) + f"sup,{sup!r},,,\n"
    else:
        text = _table(["p", "L^p mean", "grid N", "delta", "exact"],
                      [[r["p"], r["value"], r["grid_n"], r["delta"], r["exact"]] for r in rows]
                      + [["sup", sup, "", "", ""]])
    _emit(text, args.out)
    return 0


def cmd_search(args) -> int:
    if not args.inequality:
        raise UsageError("search needs --inequality")
    if args.seed is None:
        raise UsageError("search needs an explicit --seed")
    try:
        ident = resolve_id(args.inequality)
    except KeyError as e:
        raise UsageError(str(e.args[0])) from None
    p = _floats(args.p)[0] if args.p else None
    alpha = _complex(args.alpha[0]) if args.alpha else None
    param = args.param
    if param is None:
        hyps = REGISTRY[ident].hypotheses
        param = ("roots_outside" if Hyp.NONVANISHING in hyps else
                 "self_inv_half" if Hyp.SELF_INVERSIVE in hyps else "raw")
    lo, hi = _degrees(args.degree)
    try:
        cfg = SearchConfig(ident, lo, p=p, alpha=alpha, parametrization=Param(param),
                           restarts=args.restarts, max_iter=args.max_iter)
    except ValueError as e:
        raise UsageError(str(e)) from None
    res = sharpness_search(cfg, args.seed)
    best = {
        "inequality": ident, "degree": lo, "p": p,
        "alpha": None if res.alpha is None else [res.alpha.real, res.alpha.imag],
        "ratio": res.ratio, "relative_margin": res.report.relative_margin,
        "polynomial": poly_to_json(res.polynomial),
    }
    text = json.dumps(best, indent=2) + "\n"
    if args.out:
        Path(args.out + ".json").write_text(text)
        Path(args.out + ".trace.csv").write_text(trace_to_csv(res.trace))
    else:
        sys.stdout.write(text)
        sys.stderr.write(trace_to_csv(res.trace))
    return 0 if res.ratio <= 1 + 1e-6 else 1


# -- argument parser --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="polarineq",
        description="Verify polar-derivative L^p inequalities on seeded polynomial corpora.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=("json", "csv", "table"))
        p.add_argument("--grid-n", type=int, help="initial quadrature grid size")
        p.add_argument("--seed", type=int)

    v = sub.add_parser("verify", help="run inequality checks over a seeded corpus")
    common(v)
    v.add_argument("--family", required=True, help="|".join(sorted(PRESETS)))
    v.add_argument("--degree", default="1-15", help="N or LO-HI")
    v.add_argument("--ids", required=True, help="comma-separated registry ids")
    v.add_argument("--p", help="comma-separated exponents (default 2)")
    v.add_argument("--alpha", action="append", help="fixed alpha RE,IM (repeatable)")
    v.add_argument("--alpha-max", type=float, default=10.0)
    v.add_argument("--alpha-min", type=float, default=None)
    v.add_argument("--alpha-draws", type=int, default=1)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--tol", type=float, default=1e-7)
    v.add_argument("--rmax", type=float, default=3.0)
    v.add_argument("--force-hypothesis", action="store_true")

    c = sub.add_parser("counterexample", help="exact failure of the naive L^2 polar bound")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--beta", default="1", help="decimal or fraction, e.g. 21/20")
    c.add_argument("--out")
    c.add_argument("--format", choices=("json", "table"))

    k = sub.add_parser("constants", help="C_p by quadrature and Gamma-function oracle")
    common(k)
    k.add_argument("--p", help="comma-separated exponents")

    nm = sub.add_parser("norms", help="L^p means and sup norm of one polynomial")
    common(nm)
    nm.add_argument("--poly", help="polynomial JSON file")
    nm.add_argument("--family")
    nm.add_argument("--degree", default="4")
    nm.add_argument("--rmax", type=float, default=3.0)
    nm.add_argument("--p", help="comma-separated exponents")

    s = sub.add_parser("search", help="simplex search for extremal polynomials")
    s.add_argument("--inequality", required=True)
    s.add_argument("--degree", required=True)
    s.add_argument("--p")
    s.add_argument("--alpha", action="append", help="fixed alpha RE,IM")
    s.add_argument("--param", choices=[m.value for m in Param])
    s.add_argument("--restarts", type=int, default=10)
    s.add_argument("--max-iter", type=int, default=2000)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", help="path prefix for PREFIX.json and PREFIX.trace.csv")
    return ap


HANDLERS = {
    "verify": cmd_verify,
    "counterexample": cmd_counterexample,
    "constants": cmd_constants,
    "norms": cmd_norms,
    "search": cmd_search,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return HANDLERS[args.command](args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
