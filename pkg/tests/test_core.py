"""Rates, patience, random streams and the error hierarchy."""
import logging

import numpy as np
import pytest
from pydantic import ValidationError

from impatience.core.errors import (
    EXIT_ACCEPTANCE,
    EXIT_DIVERGENCE,
    EXIT_USAGE,
    AcceptanceError,
    ConfigurationError,
    DivergenceError,
    InfeasibleRatesError,
)
from impatience.core.patience import Patience, sample_patience
from impatience.core.rates import derive_service_rates, sample_delta_lambda, utilization
from impatience.core.rng import Rng
from impatience.schemas.system import ConstantPatience, ExponentialPatience, SystemConfig


def test_even_split_gives_equal_service_rates() -> None:
    mu_i, mu_j = derive_service_rates(3.5, 3.5, 0.0)
    assert mu_i == pytest.approx(1.75)
    assert mu_j == pytest.approx(1.75)


def test_offset_shifts_capacity_between_queues() -> None:
    mu_i, mu_j = derive_service_rates(3.5, 3.5, 1.0)
    assert mu_i == pytest.approx(2.25)
    assert mu_j == pytest.approx(1.25)
    assert mu_i + mu_j == pytest.approx(3.5)


@pytest.mark.parametrize(
    ("lambda_i", "lambda_j", "delta", "expected"),
    [(4.0, 4.0, 2.0, (3.0, 1.0)), (4.0, 4.0, 0.0, (2.0, 2.0)), (3.0, 5.0, -1.0, (1.0, 3.0))],
)
def test_derived_rates_table(lambda_i: float, lambda_j: float, delta: float, expected: tuple[float, float]) -> None:
    assert derive_service_rates(lambda_i, lambda_j, delta) == pytest.approx(expected)


@pytest.mark.parametrize(
    ("lam", "c", "mu", "rho", "stable"),
    [(2.0, 2, 2.0, 0.5, True), (4.0, 2, 1.0, 2.0, False), (0.0, 2, 1.0, 0.0, True)],
)
def test_utilization_table(lam: float, c: int, mu: float, rho: float, stable: bool) -> None:
    result = utilization(lam, c, mu)
    assert result.rho == pytest.approx(rho)
    assert result.stable is stable


@pytest.mark.parametrize("delta", [-3.5, 3.5, 7.0, -8.0])
def test_infeasible_offsets_are_rejected(delta: float) -> None:
    with pytest.raises(InfeasibleRatesError):
        derive_service_rates(3.5, 3.5, delta)


def test_utilization_flags_instability_without_raising(caplog: pytest.LogCaptureFixture) -> None:
    with caplog.at_level(logging.WARNING, logger="impatience.core.rates"):
        assert utilization(1.0, 2, 1.0).stable
        assert not caplog.records
        unstable = utilization(3.0, 1, 1.0)
    assert unstable.rho == pytest.approx(3.0)
    assert not unstable.stable
    assert [record.levelno for record in caplog.records] == [logging.WARNING]
    with pytest.raises(ConfigurationError):
        utilization(1.0, 2, 0.0)


def test_fixed_offset_overrides_draw(rng: Rng) -> None:
    assert sample_delta_lambda(7.0, 0.4, rng, fixed=0.25) == 0.25


def test_sampled_offsets_stay_inside_fraction(rng: Rng) -> None:
    draws = [sample_delta_lambda(7.0, 0.4, rng) for _ in range(500)]
    assert all(-2.8 < d < 2.8 for d in draws)
    with pytest.raises(ConfigurationError):
        sample_delta_lambda(7.0, 1.0, rng)


def test_rng_streams_are_reproducible_and_distinct() -> None:
    first = Rng(7, 3).generator.random(5)
    again = Rng(7, 3).generator.random(5)
    other = Rng(7, 4).generator.random(5)
    np.testing.assert_array_equal(first, again)
    assert not np.array_equal(first, other)
    assert Rng(7).spawn(3).generator.random() == Rng(7, 3).generator.random()


def test_rng_zero_rate_is_never() -> None:
    rng = Rng(1)
    assert rng.exponential(0.0) == float("inf")
    assert rng.poisson(0.0) == 0
    with pytest.raises(ValueError):
        Rng(-1)


def test_patience_is_consumed_not_reset() -> None:
    patience = Patience(5.0)
    moved = patience.advance(2.0).advance(1.5)
    assert moved.total_budget == 5.0
    assert moved.remaining == pytest.approx(1.5)
    assert not moved.exhausted
    assert moved.advance(1.5).exhausted
    with pytest.raises(ValueError):
        patience.advance(-1.0)
    with pytest.raises(ConfigurationError):
        Patience(0.0)


def test_patience_sampling(rng: Rng) -> None:
    assert sample_patience(ConstantPatience(value=3.0), rng) == 3.0
    draws = np.array([sample_patience(ExponentialPatience(mean=2.0), rng) for _ in range(20_000)])
    assert np.all(draws > 0.0)
    standard_error = 2.0 / np.sqrt(draws.size)
    assert abs(draws.mean() - 2.0) < 4 * standard_error


def test_system_defaults_split_total_rate(system: SystemConfig) -> None:
    assert system.lambda_i == pytest.approx(3.5)
    assert system.lambda_j == pytest.approx(3.5)
    assert system.mu_i == pytest.approx(1.75)
    assert system.service_rate(1) == pytest.approx(1.75)
    assert system.arrival_rate(0) == pytest.approx(3.5)
    assert system.with_seed(9).seed == 9


def test_system_validation() -> None:
    with pytest.raises(ValidationError):
        SystemConfig(lambda_total=0.0)
    with pytest.raises(ValidationError):
        SystemConfig(lambda_tar=4.0)
    with pytest.raises(ValidationError):
        SystemConfig(lambda_i=5.0, lambda_j=5.0)
    with pytest.raises(ValidationError):
        SystemConfig(delta_lambda=-3.5)
    idle = SystemConfig(lambda_total=0.0, mu_i=1.0, mu_j=2.0)
    assert idle.lambda_i == 0.0
    assert idle.mu_j == 2.0


def test_errors_carry_exit_codes_and_details() -> None:
    error = ConfigurationError("bad value", field="mu")
    assert error.exit_code == EXIT_USAGE
    assert isinstance(error, ValueError)
    assert "field='mu'" in str(error)
    assert AcceptanceError("x").exit_code == EXIT_ACCEPTANCE
    assert DivergenceError("x").exit_code == EXIT_DIVERGENCE
