import math

import numpy as np
import pytest

from polarineq.families import FamilySpec, Kind, Named, corpus, named_polynomial
from polarineq.inequalities import (REGISTRY, AlphaPolicy, CheckConfig, Hyp,
                                    HypothesisViolation, Subject, SuiteItem, check,
                                    is_regression, reports_from_csv, reports_to_csv,
                                    reports_to_jsonl, resolve_id, run_suite)
from polarineq.norms import cp_constant
from polarineq.poly import Polynomial

from .conftest import random_poly

EXPECTED_IDS = {"BERNSTEIN", "ZYGMUND", "POLAR_SUP", "CONJ4", "THM1", "DEBRUIJN", "ERDOS_LAX",
                "AZIZ_POLAR", "THM2", "THM3", "LEMMA1_PW", "LEMMA2", "LEMMA3", "ID_18_19"}


def test_registry_contents():
    assert set(REGISTRY) == EXPECTED_IDS
    assert [d.id for d in REGISTRY.values() if d.expected_fail] == ["CONJ4"]


def test_aliases():
    assert resolve_id("lemma1") == "LEMMA1_PW"
    assert resolve_id("thm2") == "THM2"
    assert resolve_id("erdos-lax") == "ERDOS_LAX"
    with pytest.raises(KeyError):
        resolve_id("nope")


@pytest.mark.parametrize("p", [1, 2, 3.5, 7])
def test_zygmund_monomial_equality(p):
    r = check("ZYGMUND", Polynomial([0, 0, 0, 0, 1.3 - 0.2j]), p=p)
    assert abs(r.relative_margin) <= 1e-12


@pytest.mark.parametrize("id", ["BERNSTEIN", "POLAR_SUP"])
def test_sup_monomial_equality(id):
    r = check(id, Polynomial([0, 0, 0, 2j]), alpha=3 - 1j)
    assert abs(r.relative_margin) <= 1e-9 and r.p is None


def test_thm1_counterexample_values():
    r = check("THM1", named_polynomial(Named.COUNTEREX, 2), alpha=1j, p=2)
    assert r.lhs ** 2 == pytest.approx(64 * math.pi, rel=1e-12)
    assert r.rhs ** 2 == pytest.approx(192 * math.pi, rel=1e-12)
    assert r.relative_margin == pytest.approx(1 - math.sqrt(64 / 192), rel=1e-12)
    assert r.passed


def test_conj4_fails_on_counterexample_without_regression():
    r = check("CONJ4", named_polynomial(Named.COUNTEREX, 2), alpha=1j, p=2,
              family=Named.COUNTEREX.value)
    assert r.lhs ** 2 == pytest.approx(64 * math.pi, rel=1e-12)
    assert r.rhs ** 2 == pytest.approx(48 * math.pi, rel=1e-12)
    assert not r.passed and r.expected_fail
    assert not is_regression(r)


def test_conj4_unexpected_pass_is_regression():
    r = check("CONJ4", named_polynomial(Named.COUNTEREX, 2), alpha=1j, p=2,
              family=Named.COUNTEREX.value)
    flipped = type(r)(**{**r.__dict__, "passed": True})
    assert is_regression(flipped)


def test_hypothesis_violations():
    inside = Polynomial([-0.25, 0, 1])
    with pytest.raises(HypothesisViolation):
        check("DEBRUIJN", inside, p=2)
    with pytest.raises(HypothesisViolation):
        check("THM3", Polynomial([1, 2]), alpha=0.5, p=2)
    with pytest.raises(HypothesisViolation):
        check("THM2", named_polynomial(Named.PLUS_ONE, 3), alpha=0.5, p=2)


def test_force_records_note():
    r = check("DEBRUIJN", Polynomial([-0.25, 0, 1]), p=2, force=True)
    assert "forced" in r.note


def test_missing_arguments():
    P = Polynomial([1, 1])
    with pytest.raises(ValueError):
        check("THM1", P, p=2)
    with pytest.raises(ValueError):
        check("THM1", P, alpha=1)
    with pytest.raises(ValueError):
        check("THM1", P, alpha=1, p=0.5)


def test_lemma3_perturbs_zero_constant():
    r = check("LEMMA3", Polynomial([0, 1, 1]), alpha=2, p=2)
    assert "perturbed" in r.note and r.passed


@pytest.mark.parametrize("n", [1, 3, 6])
def test_lemma2_monomial_equality(n):
    r = check("LEMMA2", Polynomial([0] * n + [1]), p=3)
    assert abs(r.relative_margin) <= 1e-8


def test_lemma1_pointwise_and_max_forms(rng):
    for P in corpus(FamilySpec(Kind.NONVANISHING_DISK, 7), 20, master_seed=3):
        alpha = 1.5 * np.exp(1j * rng.uniform(0, 2 * math.pi))
        r = check("LEMMA1_PW", P, alpha=alpha)
        assert r.passed
        s = Subject(P)
        a = np.abs(s.polar(alpha)(s.grid().nodes))
        b = np.abs(s.polar_q(alpha)(s.grid().nodes))
        assert a.max() <= b.max() * (1 + 1e-12)


def test_thm2_rhs_not_above_thm1():
    for P in corpus(FamilySpec(Kind.NONVANISHING_DISK, 5), 10, master_seed=8):
        s = Subject(P)
        for p in (1, 2, 3, 5):
            r1 = check("THM1", s, alpha=2j, p=p)
            r2 = check("THM2", s, alpha=2j, p=p)
            assert r2.rhs <= r1.rhs
            assert r2.rhs == pytest.approx(r1.rhs * cp_constant(p), rel=1e-14)


def test_limit_matches_zygmund(rng):
    for _ in range(10):
        P = random_poly(rng, int(rng.integers(1, 10)))
        for p in (1, 2, 3):
            big = 1e6 * np.exp(1j * rng.uniform(0, 2 * math.pi))
            t = check("THM1", P, alpha=big, p=p)
            z = check("ZYGMUND", P, p=p)
            a = abs(big)
            lhs_norm, rhs_norm = t.lhs / a, t.rhs / a * a / (a + 1)
            assert lhs_norm == pytest.approx(z.lhs, rel=1e-4)
            assert rhs_norm == pytest.approx(z.rhs, rel=1e-4)
            assert 1 - lhs_norm / rhs_norm == pytest.approx(z.relative_margin, abs=1e-4)


def test_identity_entry(rng):
    r = check("ID_18_19", random_poly(rng, 13))
    assert r.passed and r.lhs <= r.rhs


def test_thm3_with_zero_alpha_and_zero_constant():
    P = Polynomial([0, 1, 0], 2)  # z, self-inversive as degree 2 with u = 1
    r = check("THM3", P, alpha=0, p=2)
    assert r.passed


def test_run_suite_thread_independent():
    item = SuiteItem(FamilySpec(Kind.UNRESTRICTED, 1, max_degree=6), ("THM1", "ZYGMUND"),
                     AlphaPolicy(draws=2), (1.0, 2.0))
    serial, _ = run_suite([item], 12, 5, threads=1)
    parallel, summary = run_suite([item], 12, 5, threads=4)
    assert [r.to_json() for r in serial] == [r.to_json() for r in parallel]
    assert summary.ok and len(serial) == 12 * (2 * 2 + 2)


def test_run_suite_skips_small_alpha_for_alpha_ge_1_entries():
    item = SuiteItem(FamilySpec(Kind.NONVANISHING_DISK, 3), ("AZIZ_POLAR", "THM1"),
                     AlphaPolicy(fixed=(0.5,), draws=0))
    reports, _ = run_suite([item], 3, 0)
    assert {r.id for r in reports} == {"THM1"}


def test_csv_round_trip():
    item = SuiteItem(FamilySpec(Kind.NONVANISHING_DISK, 4), ("THM2", "ERDOS_LAX", "LEMMA1"),
                     AlphaPolicy(draws=1), (1.0, 3.0))
    reports, _ = run_suite([item], 5, 11)
    back = reports_from_csv(reports_to_csv(reports))
    assert back == reports


def test_csv_header_and_jsonl():
    r = check("ZYGMUND", Polynomial([1, 2]), p=2, family="x", seed=4)
    text = reports_to_csv([r])
    assert text.splitlines()[0].startswith(
        "id,family,degree,seed,alpha_re,alpha_im,p,lhs,rhs,rel_margin,pass")
    assert '"rel_margin"' in reports_to_jsonl([r])


def test_pass_tolerance_semantics():
    r = check("ZYGMUND", Polynomial([0, 1]), p=2, cfg=CheckConfig(tol=0.0))
    assert r.passed == (r.relative_margin >= 0)
