import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from kdecontact.core import ValidationError
from kdecontact.kde import Kde1d, kde_eval, kde_from_axis, kde_interval_prob, normal_cdf


def erf_series(x, terms=80):
    # Maclaurin series, independent of libm/scipy
    total = 0.0
    for n in range(terms):
        total += (-1) ** n * x ** (2 * n + 1) / (math.factorial(n) * (2 * n + 1))
    return 2.0 / math.sqrt(math.pi) * total


def quad_mass(samples, h, delta):
    k = Kde1d(samples, h)
    inside = [m for m in samples if -delta < m < delta]
    val, _ = quad(lambda x: kde_eval(k, x), -delta, delta, points=inside or None, limit=400, epsabs=1e-11, epsrel=1e-11)
    return val


def test_single_sample_peak():
    assert kde_eval(Kde1d([0.0], 1.0), 0.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), abs=1e-15)
    assert kde_eval(Kde1d([0.0], 1.0), 0.0) == pytest.approx(0.3989423, abs=1e-7)


def test_two_sample_symmetry():
    c = 0.7
    pair = kde_eval(Kde1d([-c, c], 1.0), 0.0)
    singles = 0.5 * (kde_eval(Kde1d([-c], 1.0), 0.0) + kde_eval(Kde1d([c], 1.0), 0.0))
    assert pair == pytest.approx(singles, abs=1e-15)


def test_wide_bandwidth_flattens():
    vals = [kde_eval(Kde1d([0.3, -1.2], h), 0.3) for h in (1.0, 10.0, 100.0, 1e4)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-4


def test_interval_prob_95_percent():
    sigma = 0.37
    expected = erf_series(1.959964 / math.sqrt(2.0))  # 2 Phi(z) - 1
    got = kde_interval_prob(Kde1d([0.0], sigma), 1.959964 * sigma)
    assert got == pytest.approx(expected, abs=1e-12)
    assert got == pytest.approx(0.95, abs=1e-6)


def test_far_mass_and_total_mass():
    assert kde_interval_prob(Kde1d([10.0], 0.01), 1.0) < 1e-12
    assert kde_interval_prob(Kde1d([-10.0], 0.01), 1.0) < 1e-12
    k = Kde1d([0.3, -2.0, 5.0], 0.4)
    assert kde_interval_prob(k, 1e6) == pytest.approx(1.0, abs=1e-12)


def test_interval_prob_rejects_nonpositive_delta():
    with pytest.raises(ValidationError):
        kde_interval_prob(Kde1d([0.0], 1.0), 0.0)


def test_kde_from_axis():
    k = kde_from_axis((0, 0, 0), 0.02467)
    assert k.n == 3 and k.h == 0.02467
    with pytest.raises(ValidationError):
        kde_from_axis((), 1.0)
    with pytest.raises(ValidationError):
        kde_from_axis((1.0,), 0.0)
    with pytest.raises(ValidationError):
        kde_from_axis((1.0, math.nan), 1.0)


def test_normal_cdf_against_high_precision():
    mpmath.mp.dps = 50
    xs = np.linspace(-38.0, 38.0, 4001)
    ref = np.array([float(mpmath.ncdf(x)) for x in xs])
    assert np.max(np.abs(normal_cdf(xs) - ref)) <= 1e-12


def test_density_integrates_to_one():
    k = Kde1d([-1.0, 0.2, 0.25, 3.0], 0.3)
    total, _ = quad(lambda x: kde_eval(k, x), -np.inf, np.inf, points=None)
    assert total == pytest.approx(1.0, abs=1e-9)


samples_st = st.lists(st.floats(-5, 5), min_size=1, max_size=30)


@settings(max_examples=60, deadline=None)
@given(samples_st, st.floats(0.05, 2.0), st.floats(0.05, 5.0))
def test_closed_form_matches_quadrature(samples, h, delta):
    assert kde_interval_prob(Kde1d(samples, h), delta) == pytest.approx(quad_mass(samples, h, delta), abs=1e-6)


@given(samples_st, st.floats(0.01, 2.0), st.floats(0.01, 5.0), st.floats(0.0, 5.0))
def test_monotone_in_delta(samples, h, d1, extra):
    k = Kde1d(samples, h)
    assert kde_interval_prob(k, d1) <= kde_interval_prob(k, d1 + extra) + 1e-15


@given(samples_st, st.floats(0.05, 2.0), st.floats(-5, 5), st.floats(-3, 3))
def test_translation_covariance(samples, h, c, x):
    a = kde_eval(Kde1d(np.asarray(samples) + c, h), x + c)
    b = kde_eval(Kde1d(samples, h), x)
    assert a == pytest.approx(b, abs=1e-12)


def test_outlier_moves_mass_by_at_most_one_sample():
    rng = np.random.default_rng(3)
    sigma = 0.02467
    base = rng.standard_normal(50) * sigma
    with_outlier = base.copy()
    with_outlier[17] = 100 * sigma
    p0 = kde_interval_prob(Kde1d(base, sigma), 3 * sigma)
    p1 = kde_interval_prob(Kde1d(with_outlier, sigma), 3 * sigma)
    assert abs(p0 - p1) <= 1 / 50 + 1e-9


def test_two_clusters_give_two_modes():
    sigma = 0.02467
    k = Kde1d([0.0] * 25 + [10 * sigma] * 25, sigma)
    grid = np.linspace(-5 * sigma, 15 * sigma, 4001)
    f = kde_eval(k, grid)
    peaks = np.flatnonzero((f[1:-1] > f[:-2]) & (f[1:-1] > f[2:]))
    assert len(peaks) == 2
