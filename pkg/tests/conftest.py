import numpy as np
import pytest
from hypothesis import settings, strategies as st

from polarineq.poly import Polynomial

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

finite = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False, allow_infinity=False)
complex_coeff = st.builds(complex, finite, finite)


@st.composite
def polynomials(draw, min_degree=1, max_degree=12, nonzero_ends=False):
    n = draw(st.integers(min_degree, max_degree))
    c = draw(st.lists(complex_coeff, min_size=n + 1, max_size=n + 1))
    if nonzero_ends:
        c[0] = c[0] if abs(c[0]) > 1e-3 else 1.0
        c[-1] = c[-1] if abs(c[-1]) > 1e-3 else 1.0
    return Polynomial(c, n)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_poly(rng, n, scale=1.0):
    return Polynomial(scale * (rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)), n)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
