"""Large-backlog checks: renege and jockey limits, estimator robustness, Chernoff bounds."""
import numpy as np
import pytest

from impatience.asymptotics.chernoff import chernoff_check, rate_function
from impatience.asymptotics.robustness import decision_agreement, sublinear_error_profile
from impatience.asymptotics.stats import isotonic_fit, wilson_interval, within_bands
from impatience.asymptotics.sweep import backlog_paths, sweep_backlog
from impatience.core.errors import ConfigurationError
from impatience.core.rng import Rng
from impatience.schemas.experiment import SweepConfig
from impatience.simulation.feeds import MarkovFeed, NeverActFeed, ZeroEstimateFeed

GRID = [2**p for p in range(9)]


def test_wilson_interval() -> None:
    assert wilson_interval(0, 0) == (0.0, 1.0)
    low, high = wilson_interval(50, 100)
    assert low < 0.5 < high
    low, high = wilson_interval(100, 100)
    assert high == pytest.approx(1.0)
    assert low > 0.95
    with pytest.raises(ValueError):
        wilson_interval(5, 3)


def test_isotonic_fit_and_bands() -> None:
    np.testing.assert_allclose(isotonic_fit([1.0, 3.0, 2.0]), [1.0, 2.5, 2.5])
    np.testing.assert_allclose(isotonic_fit([3.0, 1.0, 2.0], increasing=False), [3.0, 1.5, 1.5])
    assert within_bands(np.array([0.5, 0.6]), np.array([0.4, 0.5]), np.array([0.6, 0.7]))
    assert not within_bands(np.array([0.5, 0.8]), np.array([0.4, 0.5]), np.array([0.6, 0.7]))


def test_rate_function() -> None:
    assert rate_function(1.0) == 0.0
    assert rate_function(2.0) == pytest.approx(1.0 - np.log(2.0))
    assert rate_function(0.5) == pytest.approx(np.log(2.0) - 0.5)
    with pytest.raises(ValueError):
        rate_function(0.0)


def test_chernoff_bound_holds() -> None:
    report = chernoff_check(1.0, [10, 50], [1.5, 1.0, 0.5], 20_000, Rng(31))
    assert report.rate_at_one == 0.0
    assert report.convex
    assert {(row.n, row.tail) for row in report.rows} == {(10, "upper"), (10, "lower"), (50, "upper"), (50, "lower")}
    assert report.passed
    for row in report.rows:
        assert row.exact <= row.bound


def test_renege_is_inevitable_at_large_backlogs() -> None:
    result = sweep_backlog(MarkovFeed(), SweepConfig(grid=GRID), seed=7)
    assert [point.n for point in result.points] == GRID
    assert result.points[-1].renege_probability >= 0.99
    assert result.points[-1].jockey_success_probability <= 0.01
    assert result.monotone
    assert result.passed
    renege = [point.renege_trend for point in result.points]
    assert renege == sorted(renege)


def test_empty_queue_rarely_reneges() -> None:
    paths = backlog_paths(0, NeverActFeed(), SweepConfig(patience=50.0), Rng(2), reps=500)
    assert not paths.reneged.any()
    assert not paths.jockeyed.any()


def test_stationary_second_backlog_sweep() -> None:
    config = SweepConfig(grid=[1, 16, 256], m_mode="stationary", replications=500)
    result = sweep_backlog(MarkovFeed(), config, seed=3)
    assert result.m_mode == "stationary"
    assert result.points[-1].renege_probability >= 0.99


def test_simulated_sweep_agrees_on_the_limit() -> None:
    config = SweepConfig(grid=[1, 4, 32], replications=60, mode="simulated")
    result = sweep_backlog(MarkovFeed(), config, seed=5)
    assert result.mode == "simulated"
    assert result.points[-1].renege_probability > 0.9
    for point in result.points:
        assert 0.0 <= point.jockey_success_probability <= 1.0


def test_sweep_needs_distinct_rates() -> None:
    config = SweepConfig().model_copy(update={"mu_2": 1.0})
    with pytest.raises(ConfigurationError):
        sweep_backlog(MarkovFeed(), config, seed=1)


def test_markov_error_is_sublinear() -> None:
    profile = sublinear_error_profile(MarkovFeed(), GRID, 2000, Rng(9))
    assert profile.slope < 0.0
    assert profile.final_median_scaled < 0.1
    assert profile.passed
    assert profile.points[-1].estimate == pytest.approx(256.0)


def test_zero_estimator_error_is_linear() -> None:
    profile = sublinear_error_profile(ZeroEstimateFeed(), GRID, 2000, Rng(9))
    assert profile.final_median_scaled > 0.9
    assert not profile.passed


def test_error_profile_needs_two_backlogs() -> None:
    with pytest.raises(ValueError):
        sublinear_error_profile(MarkovFeed(), [0, 4], 10, Rng(1))


def test_decision_agreement() -> None:
    curve = decision_agreement(MarkovFeed(), ZeroEstimateFeed(), GRID, 1000, Rng(4))
    last = curve.points[-1]
    assert last.mean_sign == 1
    assert last.first_vs_truth > 0.99
    assert last.feed_agreement == 0.0
    same = decision_agreement(MarkovFeed(), MarkovFeed(), GRID, 1000, Rng(4))
    assert all(point.feed_agreement == 1.0 for point in same.points)
