import numpy as np
import pytest
from hypothesis import strategies as st

from skewnormal.param import DpParams


def random_correlation(rng, k):
    """Random correlation matrix from a Wishart-like draw."""
    a = rng.standard_normal((k, k + 2))
    s = a @ a.T
    d = np.sqrt(np.diag(s))
    return s / np.outer(d, d)


def random_dp(rng, k, alpha_scale=3.0):
    omega = np.exp(rng.uniform(-0.5, 0.5, k))
    rbar = random_correlation(rng, k)
    return DpParams(rng.normal(size=k), rbar * np.outer(omega, omega),
                    rng.normal(scale=alpha_scale, size=k))


@st.composite
def dp_params(draw, k_min=1, k_max=4, alpha_scale=3.0):
    k = draw(st.integers(k_min, k_max))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_dp(np.random.default_rng(seed), k, alpha_scale)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def dp2():
    return DpParams(np.zeros(2), np.array([[1.0, 0.4], [0.4, 1.0]]), np.array([3.0, 3.0]))


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
