import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fdrelay.errors import DomainError
from fdrelay.specfun import (
    gamma_fn,
    kummer_1f1,
    log_kummer_1f1,
    lower_inc_gamma,
    reg_lower_gamma,
    reg_upper_gamma,
    scaled_lower_gamma,
    tricomi_u,
    upper_inc_gamma,
    whittaker_w,
)

mpmath.mp.dps = 40


# --- gamma_fn ---------------------------------------------------------------

@pytest.mark.parametrize("x, expected", [(1, 1.0), (2, 1.0), (0.5, math.sqrt(math.pi)), (6, 120.0)])
def test_gamma_fn_values(x, expected):
    assert gamma_fn(x) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("x", [0, -1, -0.5])
def test_gamma_fn_rejects_non_positive(x):
    with pytest.raises(DomainError):
        gamma_fn(x)


# --- incomplete gamma ---------------------------------------------------------

def test_lower_inc_gamma_examples():
    assert lower_inc_gamma(1, 1) == pytest.approx(1 - math.exp(-1), rel=1e-15)
    assert lower_inc_gamma(2, 0) == 0.0
    assert lower_inc_gamma(2, 6) == pytest.approx(1 - 7 * math.exp(-6), rel=1e-15)


def test_upper_inc_gamma_examples():
    assert upper_inc_gamma(1, 0) == 1.0
    assert upper_inc_gamma(2, 1) == pytest.approx(2 * math.exp(-1), rel=1e-15)
    assert upper_inc_gamma(2, -1) == pytest.approx(0.0, abs=1e-15)


def test_upper_inc_gamma_negative_argument_continuation():
    # Gamma(3, x) = 2 e^{-x} (1 + x + x^2/2) for any real x
    for x in (-0.3, -2.0, -7.5):
        assert upper_inc_gamma(3, x) == pytest.approx(
            2 * math.exp(-x) * (1 + x + x * x / 2), rel=1e-13)


@pytest.mark.parametrize("bad", [0, -1, 1.5, 2.2])
def test_incomplete_gamma_rejects_non_integer_shape(bad):
    with pytest.raises(DomainError):
        reg_lower_gamma(bad, 1.0)


def test_lower_inc_gamma_rejects_negative_x():
    with pytest.raises(DomainError):
        lower_inc_gamma(2, -0.1)


@pytest.mark.parametrize("m", [1, 2, 3, 5, 8])
def test_incomplete_gamma_against_mpmath(m):
    xs = np.concatenate([np.geomspace(1e-4, 50, 60), [m, m + 1, m + 1.0000001]])
    lo = reg_lower_gamma(m, xs)
    hi = reg_upper_gamma(m, xs)
    for x, p, q in zip(xs, lo, hi):
        p_ref = float(mpmath.gammainc(m, 0, x, regularized=True))
        q_ref = float(mpmath.gammainc(m, x, mpmath.inf, regularized=True))
        assert p == pytest.approx(p_ref, rel=1e-12, abs=1e-300)
        assert q == pytest.approx(q_ref, rel=1e-12, abs=1e-300)


@given(m=st.integers(1, 12), x=st.floats(0, 200))
def test_lower_plus_upper_is_complete_gamma(m, x):
    total = lower_inc_gamma(m, x) + upper_inc_gamma(m, x)
    assert total == pytest.approx(gamma_fn(m), rel=1e-12)


@given(m=st.integers(1, 10), x=st.floats(0, 100), dx=st.floats(0, 10))
def test_regularized_lower_is_monotone_and_bounded(m, x, dx):
    a, b = reg_lower_gamma(m, x), reg_lower_gamma(m, x + dx)
    assert 0.0 <= a <= b <= 1.0


def test_incomplete_gamma_vectorized_matches_scalar():
    xs = np.array([0.0, 0.5, 3.0, 40.0])
    assert np.all(reg_lower_gamma(3, xs) == [reg_lower_gamma(3, float(x)) for x in xs])


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_scaled_lower_gamma_against_integral(n):
    for w in (-60.0, -29.9, -5.0, -1e-3, 0.0, 1e-3, 2.0, n + 1.0, 30.0, 300.0):
        ref = float(mpmath.quad(lambda t: t ** (n - 1) * mpmath.exp(-w * t), [0, 1]))
        assert scaled_lower_gamma(n, w) == pytest.approx(ref, rel=1e-12)


# --- 1F1 --------------------------------------------------------------------

def test_kummer_examples():
    assert kummer_1f1(1, 2, 0) == 1.0
    assert kummer_1f1(1, 2, 1) == pytest.approx(math.e - 1, rel=1e-14)
    # closed form (1 - 3 e^{-2}) / 2
    assert kummer_1f1(2, 3, -2) == pytest.approx((1 - 3 * math.exp(-2)) / 2, rel=1e-14)


@pytest.mark.parametrize("a, b, z", [
    (1, 2, -3.0), (2, 3, 5.0), (0.5, 1.5, -10.0), (3, 7, 40.0), (1, 4, -50.0),
    (2.5, 2.5, -4.0), (-2, 3, 1.7), (1, 3, -2500.0),
])
def test_kummer_against_mpmath(a, b, z):
    ref = mpmath.hyp1f1(a, b, z)
    assert kummer_1f1(a, b, z) == pytest.approx(float(ref), rel=1e-12, abs=1e-300)
    if a > 0 and b >= a:
        assert log_kummer_1f1(a, b, z) == pytest.approx(float(mpmath.log(ref)), rel=1e-12, abs=1e-12)


@settings(max_examples=200)
@given(a=st.floats(0.1, 6), extra=st.floats(0, 6), z=st.floats(-50, 50))
def test_kummer_transformation_self_consistency(a, extra, z):
    b = a + extra
    lhs = kummer_1f1(a, b, z)
    rhs = math.exp(z) * kummer_1f1(b - a, b, -z)
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_kummer_rejects_non_positive_integer_b():
    with pytest.raises(DomainError):
        kummer_1f1(1, 0, 1.0)


# --- U and W ------------------------------------------------------------------

@pytest.mark.parametrize("a, b, z", [
    (1, 2, 0.5), (2, 4, 3.0), (0.5, 1, 1.0), (3, 1, 0.01), (1, 1, 20.0), (-2, 0.5, 1.3),
])
def test_tricomi_u_against_mpmath(a, b, z):
    assert tricomi_u(a, b, z) == pytest.approx(float(mpmath.hyperu(a, b, z)), rel=1e-11)


def test_whittaker_examples():
    assert whittaker_w(0, 0.5, 2) == pytest.approx(math.exp(-1), rel=1e-13)
    assert whittaker_w(0.5, 0, 1) == pytest.approx(math.exp(-0.5), rel=1e-13)
    assert whittaker_w(-0.5, 0, 1) == pytest.approx(float(mpmath.whitw(-0.5, 0, 1)), rel=1e-12)


def test_whittaker_rejects_non_positive_argument():
    with pytest.raises(DomainError):
        whittaker_w(0, 0.5, 0.0)


def _w_via_u_integral(kappa, mu, z):
    """Independent oracle: W through the Laplace integral of U, in mpmath.

    W = e^{-z/2} z^{mu+1/2} U(a, b, z) with a = mu - kappa + 1/2, b = 1 + 2 mu;
    Kummer reflection U(a, b, z) = z^{1-b} U(a-b+1, 2-b, z) makes the first
    parameter positive so the integral converges.
    """
    a, b = mu - kappa + 0.5, 1 + 2 * mu
    a2, b2 = a - b + 1, 2 - b
    assert a2 > 0
    f = lambda t: mpmath.exp(-z * t) * t ** (a2 - 1) * (1 + t) ** (b2 - a2 - 1)
    u = z ** (1 - b) * mpmath.quad(f, [0, 1, mpmath.inf]) / mpmath.gamma(a2)
    return mpmath.exp(-z / 2) * z ** (mu + 0.5) * u


def _ratio_cdf_whittaker_grid():
    # (kappa, mu) pairs produced by the ratio-link CDF for m in {1,2,3}
    seen = set()
    for m_x in (1, 2, 3):
        for k in range(3):
            seen.add(((m_x - k - 1) / 2, (-m_x - k) / 2))
    for kappa, mu in sorted(seen):
        for c in np.geomspace(1e-3, 50, 12):
            yield kappa, mu, float(c)


@pytest.mark.parametrize("kappa, mu, c", list(_ratio_cdf_whittaker_grid()))
def test_whittaker_against_u_integral_oracle(kappa, mu, c):
    ref = float(_w_via_u_integral(kappa, mu, mpmath.mpf(c)))
    assert whittaker_w(kappa, mu, c) == pytest.approx(ref, rel=1e-8)
