"""Closed-form waits, pure-death and uniformized target queues, switch probabilities."""
import math

import numpy as np
import pytest

from impatience.core.errors import SeriesOverflowError, UnboundedGrowthError
from impatience.core.rng import Rng
from impatience.markov.erlang import (
    ErlangWait,
    erlang_stats,
    miss_deadline_probability,
    renege_fail_probability,
    renege_probability,
)
from impatience.markov.jockey import (
    expected_jockey_time,
    gamma_race_probability,
    jockey_benefit_probability,
    jockey_benefit_probability_quadrature,
    jockey_wait_closed_form,
    landing_pmf,
    switch_outcome_probabilities,
)
from impatience.markov.pure_death import (
    expected_pure_death_jockey_time,
    pure_death_jockey_time,
    pure_death_pmf,
)
from impatience.markov.uniformization import (
    TransientPmf,
    build_uniformized_chain,
    initial_distribution,
    transient_pmf,
    transient_pmf_dense,
)

DRAWS = 1_000_000


def _within(estimate: float, samples: np.ndarray, sigmas: float = 3.0) -> bool:
    standard_error = samples.std(ddof=1) / math.sqrt(samples.size)
    return abs(samples.mean() - estimate) <= sigmas * max(standard_error, 1e-12)


def test_erlang_basics() -> None:
    assert erlang_stats(10, 2.0, 1.0).mean == pytest.approx(5.0)
    origin = erlang_stats(1, 1.0, 0.0)
    assert origin.pdf == pytest.approx(1.0)
    assert origin.cdf == 0.0
    empty = ErlangWait(0, 3.0)
    assert empty.cdf(0.0) == 1.0
    assert empty.pdf(1.0) == 0.0


def test_erlang_cdf_matches_monte_carlo() -> None:
    draws = Rng(11).generator.gamma(5, 0.5, DRAWS)
    below = (draws <= 3.0).astype(float)
    assert _within(erlang_stats(5, 2.0, 3.0).cdf, below)
    assert _within(renege_probability(5, 2.0, 3.0), 1.0 - below)


def test_erlang_stays_finite_for_huge_backlogs() -> None:
    stats = erlang_stats(10**6, 1.0, 10**6)
    assert math.isfinite(stats.pdf)
    assert 0.0 < stats.cdf < 1.0


def test_renege_probability_examples() -> None:
    assert renege_probability(1, 1.0, 0.0) == 1.0
    assert renege_probability(1, 1.0, math.log(2.0)) == pytest.approx(0.5)
    assert renege_probability(0, 1.0, 3.0) == 0.0
    with pytest.raises(ValueError):
        renege_probability(-1, 1.0, 1.0)
    with pytest.raises(ValueError):
        renege_probability(1, 0.0, 1.0)


def test_renege_fail_probability_examples() -> None:
    assert renege_fail_probability(3, 1.0, 2.0, 2.0) == 0.0
    assert renege_fail_probability(3, 1.0, 2.0, 5.0) == 0.0
    assert renege_fail_probability(0, 1.0, 2.0, 1.0) == 1.0
    assert renege_fail_probability(5, 2.0, 3.0, 1.0) == pytest.approx(erlang_stats(5, 2.0, 2.0).cdf)
    assert miss_deadline_probability(5, 2.0, 3.0, 1.0) == pytest.approx(1.0 - erlang_stats(5, 2.0, 2.0).cdf)


def test_pure_death_pmf_examples() -> None:
    point = pure_death_pmf(4, 2.0, 0.0)
    np.testing.assert_allclose(point, [0, 0, 0, 0, 1])
    single = pure_death_pmf(1, 2.0, 0.3)
    assert single[1] == pytest.approx(math.exp(-0.6))
    assert single[0] == pytest.approx(1.0 - math.exp(-0.6))


def test_pure_death_pmf_matches_ctmc_monte_carlo() -> None:
    # each of three customers leaves after an independent exponential time
    lifetimes = Rng(12).generator.exponential(1.0, (DRAWS, 3))
    alive = (lifetimes > 0.5).sum(axis=1)
    assert _within(pure_death_pmf(3, 1.0, 0.5)[2], (alive == 2).astype(float))


def test_pure_death_jockey_time_examples() -> None:
    assert pure_death_jockey_time(2, 1.0) == pytest.approx(0.5)
    assert pure_death_jockey_time(1, 7.0) == 0.0
    assert pure_death_jockey_time(11, 5.0) == pytest.approx(1.0)


def test_expected_pure_death_jockey_time() -> None:
    assert expected_pure_death_jockey_time(6, 1.5, 0.0) == pytest.approx(pure_death_jockey_time(6, 1.5))
    assert expected_pure_death_jockey_time(1, 1.0, 2.0) == 0.0
    lifetimes = Rng(13).generator.exponential(1.0, (DRAWS, 3))
    alive = (lifetimes > 0.5).sum(axis=1)
    waits = np.maximum(alive - 1, 0) / 2.0
    assert _within(expected_pure_death_jockey_time(3, 1.0, 0.5), waits)


def test_chain_structure() -> None:
    pure = build_uniformized_chain(0.0, 1.0, n_max=5)
    assert pure.q == pytest.approx(2.0)
    assert pure.P.toarray()[np.triu_indices(6, 1)].sum() == 0.0
    chain = build_uniformized_chain(1.0, 1.0)
    dense = chain.P.toarray()
    assert dense[0, 1] == pytest.approx(1 / 3)
    assert dense[1, 0] == pytest.approx(1 / 3)
    assert dense[1, 1] == pytest.approx(1 / 3)
    np.testing.assert_allclose(dense.sum(axis=1), 1.0)


def test_chain_rejects_unbounded_growth() -> None:
    with pytest.raises(UnboundedGrowthError):
        build_uniformized_chain(2.0, 1.0)
    assert build_uniformized_chain(2.0, 1.0, n_max=20).n_max == 20


def test_initial_distribution() -> None:
    pi = initial_distribution(0.5)
    assert pi[0] == pytest.approx(1 / 3)
    assert pi[1] == pytest.approx(1 / 3)
    assert pi[2] == pytest.approx(1 / 6)
    assert pi.sum() == pytest.approx(1.0)
    empty = initial_distribution(0.0)
    assert empty[0] == pytest.approx(1.0)
    with pytest.raises(UnboundedGrowthError):
        initial_distribution(1.0)


def test_transient_pmf_at_zero_is_initial() -> None:
    chain = build_uniformized_chain(1.0, 1.0)
    pi0 = initial_distribution(0.5)
    result = transient_pmf(chain, pi0, 0.0)
    np.testing.assert_array_equal(result.mass, pi0)
    assert result.truncation_error == 0.0


def test_transient_pmf_matches_matrix_exponential() -> None:
    chain = build_uniformized_chain(1.0, 1.0)
    pi0 = initial_distribution(0.5, n_max=chain.n_max)
    result = transient_pmf(chain, pi0, 5.0)
    oracle = transient_pmf_dense(chain, pi0, 5.0)
    size = min(result.mass.size, oracle.size)
    np.testing.assert_allclose(result.mass[:size], oracle[:size], atol=1e-6)
    assert result.total + result.truncation_error == pytest.approx(1.0, abs=1e-9)


def test_transient_pmf_preserves_stationarity() -> None:
    chain = build_uniformized_chain(1.0, 1.0)
    pi0 = initial_distribution(0.5, n_max=chain.n_max)
    result = transient_pmf(chain, pi0, 3.0)
    size = min(result.mass.size, pi0.size)
    np.testing.assert_allclose(result.mass[:size], pi0[:size], atol=1e-6)


def test_transient_pmf_term_budget() -> None:
    chain = build_uniformized_chain(0.0, 1.0, n_max=4)
    start = np.array([0.0, 0.0, 0.0, 0.0, 1.0])
    with pytest.raises(SeriesOverflowError):
        transient_pmf(chain, start, 1e6, max_terms=1000)


def test_jockey_wait_closed_form_examples() -> None:
    assert jockey_wait_closed_form(2, 1.0, 0.0) == pytest.approx(0.5)
    assert jockey_wait_closed_form(2, 1.0, 0.0) == pytest.approx(pure_death_jockey_time(2, 1.0))
    assert jockey_wait_closed_form(1, 3.0, 1.0) == 0.0
    assert jockey_wait_closed_form(5, 2.0, 1.0) == pytest.approx(4 / 3)
    with pytest.raises(UnboundedGrowthError):
        jockey_wait_closed_form(5, 1.0, 2.0)


def test_expected_jockey_time_examples() -> None:
    assert expected_jockey_time(TransientPmf.point_mass(3), 1.0, 0.0) == pytest.approx(1.0)
    assert expected_jockey_time(TransientPmf.point_mass(0), 1.0, 0.0) == 0.0


def test_expected_jockey_time_matches_drain_monte_carlo() -> None:
    pi = initial_distribution(0.5)
    pmf = TransientPmf(t=0.0, mass=pi)
    generator = Rng(14).generator
    start = generator.choice(pi.size, size=200_000, p=pi / pi.sum())
    # two busy servers drain one customer at rate 2 until the jockey reaches a server
    drains = np.maximum(start - 1, 0)
    waits = np.where(drains > 0, generator.gamma(np.maximum(drains, 1), 0.5), 0.0)
    assert _within(expected_jockey_time(pmf, 1.0, 0.0), waits)


def test_gamma_race_probability() -> None:
    np.testing.assert_allclose(gamma_race_probability([0, 2, 1], 1.0, [3, 0, 1], 1.0), [1.0, 0.0, 0.5])
    # exponential race: Pr{X < Y} = alpha / (alpha + beta)
    assert float(gamma_race_probability(1, 3.0, 1, 1.0)) == pytest.approx(0.75)


def test_jockey_benefit_examples() -> None:
    assert jockey_benefit_probability(3, 1.0, TransientPmf.point_mass(0), 2.0, 0.0) == pytest.approx(1.0)
    assert jockey_benefit_probability(0, 1.0, TransientPmf.point_mass(4), 2.0, 0.0) == 0.0


def test_jockey_benefit_matches_paired_draws() -> None:
    pmf = TransientPmf.point_mass(4)
    generator = Rng(15).generator
    stay = generator.gamma(4, 1.0, DRAWS)
    switch = generator.gamma(3, 1 / 4.0, DRAWS)
    wins = (switch < stay).astype(float)
    assert _within(jockey_benefit_probability(4, 1.0, pmf, 2.0, 0.0), wins)


def test_jockey_benefit_quadrature_agrees() -> None:
    chain = build_uniformized_chain(0.5, 1.0)
    pmf = landing_pmf(3, chain, 0.7)
    closed = jockey_benefit_probability(3, 1.2, pmf, 1.0, 0.5)
    numeric = jockey_benefit_probability_quadrature(3, 1.2, pmf, 1.0, 0.5)
    assert closed == pytest.approx(numeric, abs=1e-6)


def test_switch_outcome_examples() -> None:
    pmf = TransientPmf.point_mass(5)
    exhausted = switch_outcome_probabilities(pmf, 1.0, 0.0, 2.0, 2.0)
    assert exhausted == (1.0, 0.0)
    immediate = switch_outcome_probabilities(TransientPmf.point_mass(0), 1.0, 0.0, 2.0, 0.5)
    assert immediate.fail == pytest.approx(0.0)
    assert immediate.success == pytest.approx(1.0)
    partial = switch_outcome_probabilities(pmf, 1.0, 0.0, 3.0, 1.0)
    assert partial.fail + partial.success == pytest.approx(1.0)
    assert 0.0 < partial.fail < 1.0


def test_landing_pmf_without_transit_is_point_mass() -> None:
    chain = build_uniformized_chain(0.5, 1.0)
    assert landing_pmf(3, chain, 0.0)[3] == 1.0
    moved = landing_pmf(3, chain, 1.0)
    assert moved.total + moved.truncation_error == pytest.approx(1.0, abs=1e-9)


SWITCH_GRID = [
    (2, 1.0, 0.5),
    (3, 1.0, 1.0),
    (5, 1.0, 2.0),
    (9, 1.0, 4.0),
    (5, 2.0, 0.5),
    (5, 0.5, 3.0),
    (9, 1.5, 2.0),
    (12, 1.0, 5.0),
    (3, 0.8, 2.5),
    (7, 1.2, 2.0),
    (4, 1.0, 0.75),
    (16, 2.0, 4.0),
]


def test_switch_outcomes_match_departure_monte_carlo() -> None:
    generator = Rng(16).generator
    for k, mu, remaining in SWITCH_GRID:
        # both servers stay busy until the jockey is next in line: k - 1 departures at rate 2 mu
        waits = generator.exponential(1.0 / (2.0 * mu), (200_000, k - 1)).sum(axis=1)
        outcome = switch_outcome_probabilities(TransientPmf.point_mass(k), mu, 0.0, remaining + 1.0, 1.0)
        assert _within(outcome.success, (waits <= remaining).astype(float), sigmas=4.0), (k, mu, remaining)
        assert outcome.fail == pytest.approx(1.0 - outcome.success)


@pytest.mark.parametrize("rho", [0.3, 0.6, 0.9])
def test_transient_pmf_matches_matrix_exponential_across_loads(rho: float) -> None:
    chain = build_uniformized_chain(2.0 * rho, 1.0)
    start = np.zeros(6)
    start[5] = 1.0
    result = transient_pmf(chain, start, 2.5)
    oracle = transient_pmf_dense(chain, start, 2.5)
    size = min(result.mass.size, oracle.size)
    np.testing.assert_allclose(result.mass[:size], oracle[:size], atol=1e-6)
    assert result.total + result.truncation_error == pytest.approx(1.0, abs=1e-9)


def test_renege_probability_is_monotone() -> None:
    backlogs = range(31)
    patiences = np.linspace(0.1, 10.0, 25)
    table = np.array([[renege_probability(k, 1.5, patience) for patience in patiences] for k in backlogs])
    assert np.all(np.diff(table, axis=0) >= -1e-15)
    assert np.all(np.diff(table, axis=1) <= 1e-15)
    assert np.all((table >= 0.0) & (table <= 1.0))


def test_jockey_wait_closed_form_reduces_to_pure_death() -> None:
    for k in range(30):
        for mu in (0.5, 1.0, 3.0):
            assert jockey_wait_closed_form(k, mu, 0.0) == pytest.approx(pure_death_jockey_time(k, mu), abs=1e-15)


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("t", [0.1, 0.7, 2.0])
def test_transient_pmf_without_arrivals_is_pure_death(n: int, t: float) -> None:
    # up to two customers both servers work, so the chain's death rates are the binomial ones
    chain = build_uniformized_chain(0.0, 1.3)
    start = np.zeros(n + 1)
    start[n] = 1.0
    mass = transient_pmf(chain, start, t).mass
    binomial = pure_death_pmf(n, 1.3, t)
    size = max(mass.size, binomial.size)
    padded = np.zeros((2, size))
    padded[0, : mass.size] = mass
    padded[1, : binomial.size] = binomial
    assert 0.5 * np.abs(padded[0] - padded[1]).sum() < 1e-6
