import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy import stats

from skewnormal.kernels import (
    TAIL_CROSSOVER,
    half_normal_cumulant,
    norm_cdf,
    norm_logcdf,
    zeta,
)

# zeta_m(x), m = 0..4, frozen from 40-digit mpmath differentiation of log(2 Phi(x))
XS = np.array([-40.0, -12.0, -5.0, -1.0, 0.0, 0.5, 3.0, 10.0])
ZETA_ORACLE = {
    0: [-803.91529483319384, -74.717525821008851, -14.37185121342878, -1.1478744644493182,
        0.0, 0.32420076527128892, 0.69179637059519712, 0.69314718055994531],
    1: [40.024968847207264, 12.082214175254284, 5.1865039671258421, 1.5251352761609812,
        0.79788456080286536, 0.50916043383703349, 0.0044378390421256638, 7.6945986267064193e-23],
    2: [-0.99937733162140861, -0.99332927366415414, -0.96730356538288777, -0.80090233442965121,
        -0.63661977236758134, -0.5138245643036329, -0.013333211541740806, -7.6945986267064193e-22],
    3: [3.1017440396486248e-5, 0.0010686026960367542, 0.0108257645063567, 0.11693119540604883,
        0.21801361414499016, 0.27099012446870783, 0.035680136876570471, 7.6176526404393552e-21],
    4: [2.3147700438918067e-6, 0.00025351456089684986, 0.0050878369738874464,
        0.07917498368074563, 0.11477068205421886, 0.088167801929197554,
        -0.081046222015181884, -7.4637606679052268e-20],
}


@pytest.mark.parametrize("m", range(5))
def test_zeta_matches_oracle(m):
    assert_allclose(zeta(m, XS), ZETA_ORACLE[m], rtol=1e-9, atol=1e-300)


def test_zeta_at_zero_is_half_normal_cumulant():
    assert zeta(0, 0.0) == 0.0
    assert_allclose(zeta(1, 0.0), np.sqrt(2 / np.pi), rtol=1e-15)
    assert_allclose(zeta(2, 0.0), -2 / np.pi, rtol=1e-15)
    for m in (3, 4):
        assert_allclose(zeta(m, 0.0), half_normal_cumulant(m), rtol=1e-12)


def test_half_normal_cumulants_closed_form():
    b = np.sqrt(2 / np.pi)
    assert_allclose(half_normal_cumulant(1), b)
    assert_allclose(half_normal_cumulant(2), 1 - b**2)
    assert_allclose(half_normal_cumulant(3), b * (4 / np.pi - 1), rtol=1e-14)
    assert_allclose(half_normal_cumulant(4), 0.1147707, atol=5e-8)


def test_half_normal_cumulants_from_moments():
    # raw moments of |Z| converted to cumulants, independent of the closed forms
    m1, m2, m3, m4 = (stats.halfnorm.moment(j) for j in range(1, 5))
    k2 = m2 - m1**2
    k3 = m3 - 3 * m2 * m1 + 2 * m1**3
    k4 = m4 - 4 * m3 * m1 - 3 * m2**2 + 12 * m2 * m1**2 - 6 * m1**4
    assert_allclose([half_normal_cumulant(j) for j in (2, 3, 4)], [k2, k3, k4], rtol=1e-12)


def test_tail_is_finite_far_out():
    x = np.array([-1e3, -1e5, -1e8])
    z1 = zeta(1, x)
    assert np.all(np.isfinite(z1))
    assert_allclose(z1, -x, rtol=1e-5)
    assert_allclose(zeta(2, x), -1.0, rtol=1e-5)
    assert np.all(np.isfinite(zeta(0, x)))


def test_crossover_is_continuous():
    eps = 1e-9
    for m in range(5):
        lo, hi = zeta(m, TAIL_CROSSOVER - eps), zeta(m, TAIL_CROSSOVER + eps)
        assert_allclose(lo, hi, rtol=1e-8, atol=1e-14)


def test_logcdf_agrees_with_log_of_cdf():
    x = np.linspace(-8, 8, 101)
    assert_allclose(norm_logcdf(x), np.log(norm_cdf(x)), rtol=1e-12, atol=1e-15)


def test_invalid_order():
    with pytest.raises(ValueError):
        zeta(5, 0.0)


@given(st.floats(-30, 30))
@settings(max_examples=200)
def test_zeta1_is_derivative_of_zeta0(x):
    h = 1e-5
    fd = (zeta(0, x + h) - zeta(0, x - h)) / (2 * h)
    assert_allclose(zeta(1, x), fd, rtol=1e-5, atol=1e-9)


@given(st.floats(-50, 50))
def test_zeta1_positive_and_zeta2_in_range(x):
    assert zeta(1, x) >= 0
    assert -1 <= zeta(2, x) <= 0
