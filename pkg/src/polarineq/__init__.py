"""Numerical and exact checks of L^p inequalities for the polar derivative."""

from .poly import (Polynomial, conj_reciprocal, derivative, from_roots, is_self_inversive,
                   polar_derivative, poly_from_json, poly_to_json, roots,
                   vanishes_in_open_unit_disk)
from .norms import (CircleGrid, cp_constant, cp_gamma_oracle, lemma_double_mean, lp_mean,
                    sup_norm, two_term_beta_mean)
from .families import FamilySpec, Kind, Named, corpus, generate
from .inequalities import REGISTRY, CheckConfig, CheckReport, check, run_suite
from .counterexample import cross_check_quadrature, exact_sides, threshold_beta
from .extremal import SearchConfig, sharpness_search, verify_extremal

__version__ = "0.1.0"
