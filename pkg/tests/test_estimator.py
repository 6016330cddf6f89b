import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import norm

from kdecontact.core import DEFAULT_NOISE, ContactEstimate, DeltaThresholds, ImuSample, NoiseModel, ValidationError
from kdecontact.estimator import (
    DEFAULT_DELTA_SIGMAS,
    EstimatorConfig,
    FootEstimator,
    estimate_series,
    estimates_to_array,
    step,
)
from kdecontact.synthgait import builtin_scenarios, generate

SIGMA = np.asarray(DEFAULT_NOISE.sigma)
THREE_SIGMA = EstimatorConfig(delta=DeltaThresholds.from_sigma(DEFAULT_NOISE, 3.0))


def samples_from(rows, t0=0.0, dt=1e-3, foot="R"):
    return [ImuSample(t0 + i * dt, r[:3], r[3:], foot) for i, r in enumerate(np.asarray(rows, dtype=float))]


def last_estimate(config, rows):
    return estimate_series(config, samples_from(rows))[-1]


def test_all_zero_window_three_sigma():
    e = last_estimate(THREE_SIGMA, np.zeros((50, 6)))
    per_axis = norm.cdf(3) - norm.cdf(-3)
    np.testing.assert_allclose(e.axis_probs, per_axis, atol=1e-12)
    assert e.p_total == pytest.approx(per_axis**6, abs=1e-12)
    assert e.p_total == pytest.approx(0.9840, abs=1e-4)
    assert e.warm


def test_far_axis_annihilates():
    rows = np.zeros((50, 6))
    rows[:, 3] = 100 * SIGMA[3]
    e = last_estimate(THREE_SIGMA, rows)
    assert e.axis_probs[3] < 1e-12
    assert e.p_total < 1e-12


def test_fusion_products():
    assert ContactEstimate.from_axis_probs(0.0, "L", [1.0] * 6).p_total == 1.0
    assert ContactEstimate.from_axis_probs(0.0, "L", [0.9] * 6).p_total == pytest.approx(0.531441, abs=1e-12)


def test_series_counts_and_errors():
    assert len(estimate_series(EstimatorConfig(), samples_from(np.zeros((2, 6))))) == 1
    assert len(estimate_series(EstimatorConfig(), samples_from(np.zeros((137, 6))))) == 136
    s = samples_from(np.zeros((3, 6)))
    with pytest.raises(ValidationError):
        estimate_series(EstimatorConfig(), [s[0], s[2], s[1]])
    with pytest.raises(ValidationError):
        estimate_series(EstimatorConfig(), [s[0], ImuSample(0.5, np.zeros(3), np.zeros(3), "L")])


def test_step_contract():
    est = FootEstimator(EstimatorConfig(d=3))
    s = samples_from(np.zeros((5, 6)))
    assert step(est, s[0]) is None
    e = step(est, s[1])
    assert e is not None and not e.warm and e.fill == 2
    assert step(est, s[2]).warm
    with pytest.raises(ValidationError):
        step(est, s[2])  # equal timestamp
    with pytest.raises(ValidationError):
        step(est, ImuSample(1.0, np.zeros(3), np.zeros(3), "L"))


def test_streaming_matches_batch_bitwise():
    rng = np.random.default_rng(7)
    rows = rng.standard_normal((300, 6)) * SIGMA * 3
    samples = samples_from(rows)
    batch = estimate_series(EstimatorConfig(), samples)
    est = FootEstimator(EstimatorConfig())
    folded = [e for e in (est.step(s) for s in samples) if e is not None]
    assert batch == folded
    assert np.array_equal(estimates_to_array(batch), estimates_to_array(folded))


def test_estimates_ignore_forces():
    base = builtin_scenarios(seed=4)["stable_walk"]
    trace = generate(base)
    heavy = trace.forces * 3.0
    a = estimate_series(EstimatorConfig(), trace.imu_samples())
    trace.forces = heavy
    b = estimate_series(EstimatorConfig(), trace.imu_samples())
    assert a == b


def test_stationary_axis_mean_matches_closed_form():
    # each kernel over a N(0, s^2) sample has expected mass 2 Phi(k / sqrt 2) - 1
    rng = np.random.default_rng(11)
    k = 3.0
    cfg = EstimatorConfig(delta=DeltaThresholds.from_sigma(DEFAULT_NOISE, k))
    probs = []
    for _ in range(400):
        est = FootEstimator(cfg)
        for s in samples_from(rng.standard_normal((50, 6)) * SIGMA):
            est.step(s)
        probs.append(est.axis_probs())
    expected = 2 * norm.cdf(k / math.sqrt(2)) - 1
    np.testing.assert_allclose(np.mean(probs, axis=0), expected, atol=3e-3)


def test_default_delta_keeps_still_foot_near_one():
    rng = np.random.default_rng(5)
    totals = []
    for _ in range(300):
        totals.append(last_estimate(EstimatorConfig(), rng.standard_normal((50, 6)) * SIGMA).p_total)
    assert np.median(totals) >= 0.95
    assert EstimatorConfig().delta.delta[0] == pytest.approx(DEFAULT_DELTA_SIGMAS * SIGMA[0])


@pytest.mark.parametrize("cfg", [THREE_SIGMA, EstimatorConfig()], ids=["3sigma", "default"])
def test_ten_sigma_offset_rejected(cfg):
    rng = np.random.default_rng(2)
    rows = rng.standard_normal((50, 6)) * SIGMA
    rows[:, 0] += 10 * SIGMA[0]
    assert last_estimate(cfg, rows).p_total < 0.01


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.floats(-1, 1), min_size=2, max_size=20),
    st.floats(0.01, 1.0),
    st.floats(0.01, 3.0),
    st.floats(0.1, 50.0),
)
def test_joint_scaling_leaves_axis_prob_unchanged(values, sigma, delta, c):
    def prob(scale):
        noise = NoiseModel([sigma * scale] + [1.0] * 5)
        cfg = EstimatorConfig(d=len(values), noise=noise, delta=DeltaThresholds([delta * scale] + [1.0] * 5))
        rows = np.zeros((len(values), 6))
        rows[:, 0] = np.asarray(values) * scale
        return last_estimate(cfg, rows).axis_probs[0]

    assert prob(c) == pytest.approx(prob(1.0), abs=1e-12)


def test_config_validation_and_warning():
    with pytest.raises(ValidationError):
        EstimatorConfig(d=1)
    with pytest.warns(UserWarning):
        EstimatorConfig(d=150, sample_rate=1000)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        EstimatorConfig(d=50, sample_rate=1000)
