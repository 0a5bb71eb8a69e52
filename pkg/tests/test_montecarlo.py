import math
from fractions import Fraction as F

import numpy as np
import pytest

from fourier_dilation.montecarlo import (
    GridMismatchError,
    PathSample,
    cross_validate_conditional,
    cross_validate_expectation,
    evaluate,
    evaluate_W,
    sample_paths,
)
from fourier_dilation.sampling import random_weyl
from fourier_dilation.weyl import StepVector, WeylPolynomial


def test_increments_have_brownian_variance():
    paths = sample_paths([0, F(1, 4), 1], dim=2, count=200_000, seed=1)
    inc = paths.increments()
    assert inc.shape == (200_000, 2, 2)
    var = inc.var(axis=0)
    assert np.allclose(var[0], 0.25, rtol=0.02) and np.allclose(var[1], 0.75, rtol=0.02)
    assert paths.calibration().max() < 5


def test_W_second_moment():
    h = StepVector(2, (0, F(1, 2), F(3, 2)), [[1.0, 0.0], [0.5, -1.0]])
    w = evaluate_W(h, sample_paths(h.breaks, 2, 400_000, seed=2))
    # E W(h)^2 = |h|^2 = 0.5 + 1.25
    assert abs(np.mean(w**2) - 1.75) < 5 * np.std(w**2) / math.sqrt(w.size)


def test_sampling_is_deterministic_and_batch_independent_of_consumer():
    a = PathSample((0, 1), 1, 20_000, seed=5).increments()
    b = PathSample((0, 1), 1, 20_000, seed=5).increments()
    assert np.array_equal(a, b)
    c = PathSample((0, 1), 1, 20_000, seed=6).increments()
    assert not np.array_equal(a, c)
    # the first batches agree when more paths are requested
    d = PathSample((0, 1), 1, 30_000, seed=5).increments()
    assert np.array_equal(a[:16384], d[:16384])


def test_expectation_cross_validation():
    h = StepVector.indicator(0, 1, [1.0])
    r = cross_validate_expectation(WeylPolynomial.exp(h), 100_000, seed=0)
    assert abs(r.symbolic - math.exp(-0.5)) < 1e-15
    assert not r.flagged
    const = cross_validate_expectation(3 * WeylPolynomial.one(1), 1000)
    assert const.z == 0 and const.estimate == 3


def test_random_polynomials_agree():
    rng = np.random.default_rng(11)
    zs = [cross_validate_expectation(random_weyl(rng, 2, 4), 20_000, seed=i).z for i in range(8)]
    assert max(zs) < 5


def test_stderr_scaling():
    x = random_weyl(np.random.default_rng(0), 1, 3)
    small = cross_validate_expectation(x, 10_000, seed=3)
    big = cross_validate_expectation(x, 40_000, seed=3)
    ratio = small.stderr_re / big.stderr_re
    assert 1 <= ratio <= 4


def test_conditional_closed_form():
    # x = e^{i sqrt2 W(1_(0,t] b)}, probe g = 1_(0,u] b, |b|^2 = psi
    b = np.array([0.6, 0.8])
    t, u = F(1), F(1, 2)
    x = WeylPolynomial.exp(StepVector.indicator(0, t, math.sqrt(2) * b))
    probe = StepVector.indicator(0, u, b)
    (r,) = cross_validate_conditional(x, u, [probe], 100_000, seed=4)
    expected = math.exp(-(t - u)) * math.exp(-((math.sqrt(2) + 1) ** 2) * float(u) / 2)
    assert abs(r.symbolic - expected) < 1e-14
    assert not r.flagged


def test_probe_support_and_grid_errors():
    x = WeylPolynomial.exp(StepVector.indicator(0, 1, [1.0]))
    with pytest.raises(ValueError, match="beyond"):
        cross_validate_conditional(x, F(1, 2), [StepVector.indicator(0, 1, [1.0])], 1000)
    with pytest.raises(ValueError):
        cross_validate_expectation(x, 10)
    with pytest.raises(GridMismatchError):
        evaluate(x, sample_paths([0, F(1, 3)], 1, 100, seed=0))
    with pytest.raises(GridMismatchError):
        evaluate(x, sample_paths([0, 1], 2, 100, seed=0))


def test_mc_result_json():
    r = cross_validate_expectation(WeylPolynomial.exp(StepVector.indicator(0, 1, [1.0])), 1000)
    d = r.to_json()
    assert set(d) == {"symbolic", "estimate", "stderr", "z", "count", "flagged"}
