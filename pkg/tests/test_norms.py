import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from polarineq.norms import (CircleGrid, cp_constant, cp_gamma_oracle, double_mean_report,
                             lemma_double_mean, lp_mean, lp_mean_report, sup_norm,
                             two_term_beta_mean, two_term_beta_mean_radial)
from polarineq.poly import Polynomial, conj_reciprocal, derivative, evaluate
from polarineq.families import Named, named_polynomial

from .conftest import complex_coeff, polynomials, random_poly

TWO_PI = 2 * math.pi


def _quad_lp(P, p):
    f = lambda t: abs(evaluate(P, complex(math.cos(t), math.sin(t)))) ** p
    val, _ = quad(f, 0, TWO_PI, limit=400, epsabs=0, epsrel=1e-12)
    return val ** (1 / p)


# -- grid ---------------------------------------------------------------------

def test_grid_minimum_size():
    with pytest.raises(ValueError):
        CircleGrid(4)


def test_default_grid():
    assert CircleGrid.default_for(3).N == 4096
    assert CircleGrid.default_for(1000).N == 8001


def test_grid_exactness_rule():
    g = CircleGrid(9)
    assert g.exact_for(4, 2)
    assert not g.exact_for(5, 2)
    assert not g.exact_for(1, 3)


# -- lp_mean --------------------------------------------------------------------

@pytest.mark.parametrize("p", [1, 1.5, 2, 3, 7])
def test_lp_monomial(p):
    a = 0.6 - 1.1j
    assert lp_mean(Polynomial([0, 0, 0, a]), p) == pytest.approx(TWO_PI ** (1 / p) * abs(a),
                                                                 rel=1e-12)


def test_lp_examples():
    assert lp_mean(Polynomial([1, -1j]), 2) == pytest.approx(math.sqrt(4 * math.pi), rel=1e-13)
    assert lp_mean(Polynomial([1, -2j, -1]), 2) == pytest.approx(math.sqrt(12 * math.pi),
                                                                 rel=1e-13)


@given(polynomials(max_degree=20))
def test_parseval(P):
    n = P.degree
    exact = TWO_PI * float(np.sum(np.abs(P.padded()) ** 2))
    val = lp_mean(P, 2, CircleGrid(max(8, 4 * n + 1))) ** 2
    assert abs(val - exact) <= 1e-10 * exact + 1e-300


@pytest.mark.parametrize("p", [1, 3, 5])
def test_lp_against_adaptive_quadrature(p, rng):
    P = random_poly(rng, 6)
    assert lp_mean(P, p) == pytest.approx(_quad_lp(P, p), rel=1e-9)


@pytest.mark.parametrize("p", [1, 2.5, 3])
def test_grid_doubling_stability(p, rng):
    P = Polynomial(np.r_[3.0, 0.2 * rng.standard_normal(5)], 5)  # no circle zeros
    a = lp_mean(P, p, CircleGrid(256), adaptive=False)
    b = lp_mean(P, p, CircleGrid(512), adaptive=False)
    assert abs(a - b) / b <= 1e-9


def test_cusp_integrand_converges_to_closed_form():
    # int |1 + e^{it}|^1 = 8
    rep = lp_mean_report(named_polynomial(Named.PLUS_ONE, 1), 1.0)
    assert rep.converged and rep.value == pytest.approx(8.0, rel=1e-8)


def test_non_exact_fixed_grid_warns():
    rep = lp_mean_report(Polynomial([1, 1]), 3.0, CircleGrid(16), adaptive=False)
    assert rep.warning is not None


def test_lp_large_exponent_does_not_overflow():
    P = Polynomial([1e150, 1e150])
    assert math.isfinite(lp_mean(P, 64))


def test_lp_rejects_small_p():
    with pytest.raises(ValueError):
        lp_mean(Polynomial([1, 1]), 0.5)


# -- sup norm -------------------------------------------------------------------

def test_sup_examples():
    assert sup_norm(Polynomial([0, 0, 0, 2 - 1j])) == pytest.approx(abs(2 - 1j), rel=1e-14)
    assert sup_norm(named_polynomial(Named.PLUS_ONE, 5)) == pytest.approx(2, rel=1e-14)
    assert sup_norm(Polynomial([1, -1j])) == pytest.approx(2, rel=1e-12)


def test_sup_is_refined_above_grid(rng):
    P = random_poly(rng, 9)
    dense = np.max(np.abs(evaluate(P, np.exp(2j * np.pi * np.arange(2 ** 18) / 2 ** 18))))
    s = sup_norm(P)
    assert s >= dense * (1 - 1e-12)
    assert s <= dense * (1 + 1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_p128_close_to_sup(seed):
    rng = np.random.default_rng(seed)
    P = random_poly(rng, int(rng.integers(1, 11)))
    ratio = lp_mean(P, 128) / sup_norm(P)
    assert abs(ratio - 1) <= 0.05


# -- C_p --------------------------------------------------------------------------

def test_cp_known_values():
    assert abs(cp_constant(2) - 0.7071067811865476) <= 1e-12
    assert abs(cp_constant(1) - math.pi / 4) <= 1e-10


@pytest.mark.parametrize("p", [1, 1.5, 2, 3, 4, 8, 16, 33.3])
def test_cp_matches_gamma_oracle(p):
    assert abs(cp_constant(p) - cp_gamma_oracle(p)) <= 1e-9


def test_cp_tends_to_half():
    c = cp_constant(64)
    assert 0.50 <= c <= 0.53
    assert cp_constant(16) > c > cp_constant(256) > 0.5


@given(st.floats(1, 50))
def test_cp_at_most_one(p):
    assert cp_gamma_oracle(p) <= 1.0


# -- two-term beta mean ---------------------------------------------------------

def test_two_term_examples():
    assert two_term_beta_mean(1.5 - 2j, 0, 3) == pytest.approx(TWO_PI * 2.5 ** 3, rel=1e-13)
    assert two_term_beta_mean(1, 1, 2) == pytest.approx(4 * math.pi, rel=1e-13)


@given(complex_coeff, complex_coeff, st.floats(1, 8))
def test_two_term_swap_symmetry(a, b, p):
    x, y = two_term_beta_mean(a, b, p), two_term_beta_mean(b, a, p)
    assert abs(x - y) <= 1e-12 * max(x, 1e-300)


@given(complex_coeff, complex_coeff, st.floats(1, 8))
def test_two_term_lower_bound(a, b, p):
    lo = TWO_PI * max(abs(a), abs(b)) ** p
    scale = max(abs(a), abs(b), 1) ** p
    assert two_term_beta_mean(a, b, p) >= lo - 1e-9 * scale
    assert two_term_beta_mean_radial(a, b, p) >= lo - 1e-9 * scale


@pytest.mark.parametrize("p", [1, 1.5, 2, 3, 6])
def test_two_term_monotone_in_r(p):
    vals = [two_term_beta_mean(r, 1, p) for r in (1, 1.5, 2, 4)]
    assert all(x <= y for x, y in zip(vals, vals[1:]))


@pytest.mark.parametrize("a,b,p", [(1, 1, 1), (0.3, 2, 1.5), (1 + 1j, 0.5, 3), (2, 2j, 5.5)])
def test_two_term_against_scipy(a, b, p):
    ref, _ = quad(lambda t: abs(a + b * complex(math.cos(t), math.sin(t))) ** p, 0, TWO_PI,
                  points=[math.pi], limit=400, epsrel=1e-13)
    assert two_term_beta_mean(a, b, p) == pytest.approx(ref, rel=1e-10)
    assert two_term_beta_mean_radial(a, b, p) == pytest.approx(ref, rel=1e-10)


# -- double mean ------------------------------------------------------------------

def test_double_mean_with_zero_b(rng):
    g = CircleGrid(256)
    A = evaluate(random_poly(rng, 4), g.nodes)
    val = lemma_double_mean(A, np.zeros(g.N), 3, g)
    assert val == pytest.approx(TWO_PI * np.sum(np.abs(A) ** 3) * g.weight, rel=1e-12)


@pytest.mark.parametrize("n,p", [(3, 1), (5, 2), (6, 3.5)])
def test_double_mean_monomial_equality(n, p):
    P = Polynomial([0] * n + [1])
    g = CircleGrid(64)
    A = evaluate(derivative(conj_reciprocal(P)), g.nodes)
    B = evaluate(derivative(P), g.nodes)
    expected = TWO_PI * TWO_PI * n ** p
    assert lemma_double_mean(A, B, p, g) == pytest.approx(expected, rel=1e-12)
    assert lemma_double_mean(A, B, p, g, CircleGrid(64)) == pytest.approx(expected, rel=1e-12)


def test_double_mean_parseval_oracle(rng):
    # p = 2: the beta-mean of |A + e^{ib}B|^2 is 2pi(|A|^2 + |B|^2)
    P = random_poly(rng, 5)
    A, B = derivative(conj_reciprocal(P)), derivative(P)
    oracle = TWO_PI * TWO_PI * float(np.sum(np.abs(A.padded()) ** 2)
                                     + np.sum(np.abs(B.padded()) ** 2))
    g = CircleGrid(64)
    val = lemma_double_mean(evaluate(A, g.nodes), evaluate(B, g.nodes), 2, g)
    assert val == pytest.approx(oracle, rel=1e-12)
    assert double_mean_report(A, B, 2).value == pytest.approx(oracle, rel=1e-10)
    # Lemma-2 type bound holds with non-negative margin
    bound = TWO_PI * 5 ** 2 * lp_mean(P, 2) ** 2
    assert val <= bound


def test_double_mean_radial_matches_beta_quadrature(rng):
    P = random_poly(rng, 4)
    g = CircleGrid(128)
    A = evaluate(derivative(conj_reciprocal(P)), g.nodes)
    B = evaluate(derivative(P), g.nodes)
    fast = lemma_double_mean(A, B, 3, g)
    slow = lemma_double_mean(A, B, 3, g, CircleGrid(4096))
    assert fast == pytest.approx(slow, rel=1e-9)


def test_double_mean_shape_check():
    with pytest.raises(ValueError):
        lemma_double_mean(np.ones(10), np.ones(10), 2, CircleGrid(16))
