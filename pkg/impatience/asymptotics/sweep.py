"""Backlog sweep: renege and successful-jockey probabilities of a request behind ``n`` jobs.

In ``decomposed`` mode a tagged request behind ``n`` jobs of queue 1 waits ``W_1(n)``; if its
feed elects to switch at entry it additionally waits ``W_2(m)`` behind the ``m`` jobs of
queue 2, so ``W_total = W_1(n) + W_2(m)``. It reneges when ``W_total`` exceeds the patience and
jockeys successfully when it switched and ``W_total`` stays within it. ``simulated`` mode runs
the event engine from the pre-loaded state instead.
"""
import logging
from typing import NamedTuple

import numpy as np

from impatience.asymptotics.stats import isotonic_fit, wilson_interval, within_bands
from impatience.core.errors import ConfigurationError
from impatience.core.rng import Rng
from impatience.schemas.asymptotics import BacklogSweep, SweepPoint
from impatience.schemas.experiment import SweepConfig
from impatience.schemas.feed import Decision, Observation
from impatience.schemas.system import ConstantPatience, SystemConfig
from impatience.simulation.engine import Simulator
from impatience.simulation.feeds import InformationFeed

logger = logging.getLogger(__name__)

SIMULATION_STREAMS = 1 << 20


class BacklogPaths(NamedTuple):
    """Per-replication paths at one backlog."""

    first_wait: np.ndarray
    total_wait: np.ndarray
    jockeyed: np.ndarray
    reneged: np.ndarray
    successful: np.ndarray


def _erlang(rng: Rng, shape: np.ndarray | int, mu: float, size: int) -> np.ndarray:
    shape = np.broadcast_to(np.asarray(shape, dtype=np.int64), (size,))
    draws = np.zeros(size)
    positive = shape > 0
    if np.any(positive):
        draws[positive] = rng.generator.gamma(shape[positive], 1.0 / mu)
    return draws


def _second_backlog(sweep: SweepConfig, rng: Rng, reps: int) -> np.ndarray:
    if sweep.m_mode == "fixed":
        return np.full(reps, sweep.m, dtype=np.int64)
    # stationary M/M/1 occupancy of queue 2
    return rng.generator.geometric(1.0 - sweep.stationary_rho, reps).astype(np.int64) - 1


def backlog_paths(n: int, feed: InformationFeed, sweep: SweepConfig, rng: Rng, reps: int | None = None) -> BacklogPaths:
    reps = sweep.replications if reps is None else reps
    m = _second_backlog(sweep, rng, reps)
    decisions = {}
    for value in np.unique(m).tolist():
        obs = Observation(k_i=n, k_j=value, mu_i=sweep.mu_1, mu_j=sweep.mu_2, remaining=sweep.patience, elapsed=0.0)
        decisions[value] = feed.decide(obs).decision == Decision.JOCKEY
    jockeyed = np.array([decisions[value] for value in m.tolist()], dtype=bool)
    first = _erlang(rng, n, sweep.mu_1, reps)
    second = _erlang(rng, m, sweep.mu_2, reps)
    total = first + np.where(jockeyed, second, 0.0)
    reneged = total > sweep.patience
    return BacklogPaths(first, total, jockeyed, reneged, jockeyed & ~reneged)


def _simulated_paths(n: int, feed: InformationFeed, sweep: SweepConfig, seed: int, stream: int) -> BacklogPaths:
    config = SystemConfig(
        lambda_total=0.0,
        mu_i=sweep.mu_1,
        mu_j=sweep.mu_2,
        patience_model=ConstantPatience(value=sweep.patience),
        seed=seed,
    )
    m = _second_backlog(sweep, Rng(seed, stream), sweep.replications)
    outcomes = []
    for rep in range(sweep.replications):
        simulator = Simulator(
            config,
            feed,
            Rng(seed, SIMULATION_STREAMS + stream * sweep.replications + rep),
            horizon=1.0,
            initial_lengths=(n, int(m[rep])),
            tagged_patience=sweep.patience,
        )
        outcomes.append(simulator.run_tagged())
    wait = np.array([outcome.wait for outcome in outcomes])
    jockeyed = np.array([outcome.jockeyed for outcome in outcomes])
    reneged = np.array([outcome.reneged for outcome in outcomes])
    return BacklogPaths(wait, wait, jockeyed, reneged, jockeyed & ~reneged)


def sweep_backlog(feed: InformationFeed, sweep: SweepConfig, seed: int) -> BacklogSweep:
    """Estimate both probabilities along ``sweep.grid`` with Wilson bands and isotonic trends."""
    if sweep.mu_1 == sweep.mu_2:
        raise ConfigurationError("the backlog sweep needs mu_1 != mu_2")
    logger.info("Backlog sweep over %d points (%s mode, %d replications)", len(sweep.grid), sweep.mode, sweep.replications)
    renege_counts, success_counts, jockey_counts = [], [], []
    for index, n in enumerate(sweep.grid):
        if sweep.mode == "decomposed":
            paths = backlog_paths(n, feed, sweep, Rng(seed, index))
        else:
            paths = _simulated_paths(n, feed, sweep, seed, index)
        renege_counts.append(int(paths.reneged.sum()))
        success_counts.append(int(paths.successful.sum()))
        jockey_counts.append(int(paths.jockeyed.sum()))

    reps = sweep.replications
    renege_p = np.array(renege_counts) / reps
    success_p = np.array(success_counts) / reps
    renege_bands = np.array([wilson_interval(count, reps, sweep.confidence) for count in renege_counts])
    success_bands = np.array([wilson_interval(count, reps, sweep.confidence) for count in success_counts])
    renege_trend = isotonic_fit(renege_p, increasing=True)
    # success is identically zero until the feed first elects to switch; the trend starts there
    switching = np.flatnonzero(np.array(jockey_counts) > 0)
    start = int(switching[0]) if switching.size else len(sweep.grid)
    success_trend = success_p.copy()
    if start < len(sweep.grid):
        success_trend[start:] = isotonic_fit(success_p[start:], increasing=False)
    monotone = within_bands(renege_trend, renege_bands[:, 0], renege_bands[:, 1]) and within_bands(
        success_trend, success_bands[:, 0], success_bands[:, 1]
    )
    points = [
        SweepPoint(
            n=n,
            replications=reps,
            jockey_fraction=jockey_counts[i] / reps,
            renege_probability=float(renege_p[i]),
            renege_low=float(renege_bands[i, 0]),
            renege_high=float(renege_bands[i, 1]),
            jockey_success_probability=float(success_p[i]),
            jockey_success_low=float(success_bands[i, 0]),
            jockey_success_high=float(success_bands[i, 1]),
            renege_trend=float(renege_trend[i]),
            jockey_success_trend=float(success_trend[i]),
        )
        for i, n in enumerate(sweep.grid)
    ]
    return BacklogSweep(
        patience=sweep.patience,
        m=sweep.m,
        m_mode=sweep.m_mode,
        mode=sweep.mode,
        mu_1=sweep.mu_1,
        mu_2=sweep.mu_2,
        confidence=sweep.confidence,
        points=points,
        renege_target_met=bool(renege_p[-1] >= sweep.renege_target),
        jockey_target_met=bool(success_p[-1] <= sweep.jockey_target),
        monotone=monotone,
    )
