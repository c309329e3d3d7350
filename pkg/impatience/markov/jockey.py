"""Jockey waiting time in the target queue and switch outcome probabilities.

A jockey landing behind ``k`` customers in a target queue with ``c`` servers of rate ``mu``,
while ``lambda_tar`` arrivals keep joining ahead of it, waits for ``k - c + 1`` net drains at
rate ``c mu - lambda_tar``. For ``c = 2`` the mean is ``(k - 1) / (2 mu - lambda_tar)``, which
reduces to the exact pure-death law at ``lambda_tar = 0``.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate, special, stats

from impatience.core.errors import UnboundedGrowthError
from impatience.core.rng import Rng
from impatience.markov.uniformization import (
    DEFAULT_EPS,
    SERVERS,
    TransientPmf,
    UniformizedChain,
    transient_pmf,
)

QUADRATURE_TOLERANCE = 1e-8


class SwitchOutcome(NamedTuple):
    fail: float
    success: float


def drain_rate(mu: float, lambda_tar: float, servers: int = SERVERS) -> float:
    """Net rate ``c mu - lambda_tar`` at which the backlog ahead of a jockey shrinks."""
    if servers not in (1, 2):
        raise ValueError(f"only one or two servers are supported, got {servers}")
    if mu <= 0.0 or lambda_tar < 0.0:
        raise ValueError(f"need mu > 0 and lambda_tar >= 0, got mu={mu}, lambda_tar={lambda_tar}")
    rate = servers * mu - lambda_tar
    if rate <= 0.0:
        raise UnboundedGrowthError(
            "jockey wait is unbounded when arrivals ahead match the service capacity",
            mu=mu,
            lambda_tar=lambda_tar,
            servers=servers,
        )
    return rate


def drain_shape(k: np.ndarray | int, servers: int = SERVERS) -> np.ndarray:
    """Number of net drains a jockey behind ``k`` customers waits for."""
    return np.maximum(np.asarray(k, dtype=np.int64) - servers + 1, 0)


@dataclass(frozen=True, slots=True)
class JockeyWaitDistribution:
    """Point mass at zero when ``k < c``; otherwise Erlang(k - c + 1, c mu - lambda_tar)."""

    k: int
    mu: float
    lambda_tar: float = 0.0
    servers: int = SERVERS

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError(f"landing position must be non-negative, got {self.k}")
        drain_rate(self.mu, self.lambda_tar, self.servers)

    @property
    def shape(self) -> int:
        return int(drain_shape(self.k, self.servers))

    @property
    def rate(self) -> float:
        return drain_rate(self.mu, self.lambda_tar, self.servers)

    @property
    def mean(self) -> float:
        return self.shape / self.rate

    def cdf(self, t: float) -> float:
        if t < 0.0:
            return 0.0
        if self.shape == 0:
            return 1.0
        return float(special.gammainc(self.shape, self.rate * t))

    def pdf(self, t: float) -> float:
        if self.shape == 0 or t < 0.0:
            return 0.0
        return float(np.exp(stats.gamma.logpdf(t, a=self.shape, scale=1.0 / self.rate)))

    def sample(self, rng: Rng, size: int | None = None) -> float | np.ndarray:
        if self.shape == 0:
            return 0.0 if size is None else np.zeros(size)
        draws = rng.generator.gamma(self.shape, 1.0 / self.rate, size)
        return float(draws) if size is None else draws


def jockey_wait_closed_form(k: int, mu: float, lambda_tar: float, servers: int = SERVERS) -> float:
    """Expected wait until service start for a jockey landing behind ``k`` customers."""
    return JockeyWaitDistribution(int(k), mu, lambda_tar, servers).mean


def expected_jockey_time(pmf: TransientPmf, mu: float, lambda_tar: float, servers: int = SERVERS) -> float:
    """Jockey wait averaged over the target occupancy ``pmf``."""
    rate = drain_rate(mu, lambda_tar, servers)
    shapes = drain_shape(np.arange(pmf.mass.size), servers)
    return float(pmf.mass @ (shapes / rate))


def gamma_race_probability(
    a: np.ndarray | int, alpha: float | np.ndarray, b: np.ndarray | int, beta: float | np.ndarray
) -> np.ndarray:
    """``Pr{X < Y}`` for independent ``X ~ Gamma(a, rate alpha)`` and ``Y ~ Gamma(b, rate beta)``.

    Integer shapes only; a zero shape is a point mass at zero. With both shapes positive, X wins
    exactly when at least ``a`` of the first ``a + b - 1`` events of the merged Poisson streams
    belong to X, a binomial tail.
    """
    a, b, alpha, beta = np.broadcast_arrays(
        np.asarray(a, dtype=np.int64),
        np.asarray(b, dtype=np.int64),
        np.asarray(alpha, dtype=float),
        np.asarray(beta, dtype=float),
    )
    result = np.zeros(a.shape, dtype=float)
    x_zero = (a == 0) & (b > 0)
    result[x_zero] = 1.0
    race = (a > 0) & (b > 0)
    if np.any(race):
        p = alpha[race] / (alpha[race] + beta[race])
        trials = a[race] + b[race] - 1
        result[race] = special.bdtrc(a[race] - 1, trials, p)
    return result


def jockey_benefit_probability(
    k_i: int,
    mu_i: float,
    pmf: TransientPmf,
    mu_j: float,
    lambda_tar: float,
    servers: int = SERVERS,
) -> float:
    """Probability that switching reaches service before staying behind ``k_i`` jobs would.

    ``k_i`` indexes the origin backlog (wait Erlang(k_i, mu_i)); ``pmf`` is the target
    occupancy a jockey lands behind. Each mixture term uses :func:`gamma_race_probability`.
    """
    if k_i < 0 or mu_i <= 0.0:
        raise ValueError(f"need k_i >= 0 and mu_i > 0, got k_i={k_i}, mu_i={mu_i}")
    if k_i == 0:
        return 0.0
    rate = drain_rate(mu_j, lambda_tar, servers)
    shapes = drain_shape(np.arange(pmf.mass.size), servers)
    terms = gamma_race_probability(shapes, rate, int(k_i), mu_i)
    return float(pmf.mass @ terms)


def jockey_benefit_probability_quadrature(
    k_i: int,
    mu_i: float,
    pmf: TransientPmf,
    mu_j: float,
    lambda_tar: float,
    servers: int = SERVERS,
) -> float:
    """Same quantity as :func:`jockey_benefit_probability` by adaptive quadrature of the integral."""
    if k_i == 0:
        return 0.0
    rate = drain_rate(mu_j, lambda_tar, servers)
    scale = 1.0 / mu_i
    total = 0.0
    for k in np.flatnonzero(pmf.mass):
        shape = int(drain_shape(k, servers))
        if shape == 0:
            total += pmf.mass[k]
            continue

        def integrand(u: float, shape: int = shape) -> float:
            return stats.gamma.pdf(u, a=k_i, scale=scale) * special.gammainc(shape, rate * u)

        value, _ = integrate.quad(integrand, 0.0, math.inf, epsabs=QUADRATURE_TOLERANCE, limit=200)
        total += pmf.mass[k] * value
    return float(total)


def switch_outcome_probabilities(
    pmf: TransientPmf,
    mu_j: float,
    lambda_tar: float,
    patience: float,
    elapsed: float,
    servers: int = SERVERS,
) -> SwitchOutcome:
    """Probabilities that a switch misses (``fail``) or meets (``success``) the remaining patience.

    Mass the truncated ``pmf`` does not carry counts as failure.
    """
    if elapsed < 0.0:
        raise ValueError(f"elapsed time must be non-negative, got {elapsed}")
    remaining = patience - elapsed
    if remaining <= 0.0:
        return SwitchOutcome(fail=1.0, success=0.0)
    rate = drain_rate(mu_j, lambda_tar, servers)
    shapes = drain_shape(np.arange(pmf.mass.size), servers)
    in_time = np.where(shapes == 0, 1.0, special.gammainc(np.maximum(shapes, 1), rate * remaining))
    fail = min(max(1.0 - float(pmf.mass @ in_time), 0.0), 1.0)
    return SwitchOutcome(fail=fail, success=1.0 - fail)


def landing_pmf(
    k_j: int,
    chain: UniformizedChain,
    transit_time: float,
    eps: float = DEFAULT_EPS,
) -> TransientPmf:
    """Target occupancy a jockey finds after a transit of ``transit_time`` starting from ``k_j``."""
    if transit_time == 0.0:
        return TransientPmf.point_mass(int(k_j))
    start = np.zeros(int(k_j) + 1)
    start[-1] = 1.0
    return transient_pmf(chain, start, transit_time, eps)
