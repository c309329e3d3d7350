"""Erlang remaining-work distributions and renege probabilities.

A request with ``k`` requests ahead in a queue served at rate ``mu`` waits ``W(k)``, the sum of
``k`` i.i.d. exponential service times. Densities and distribution functions are evaluated in
log space through scipy so that ``k`` up to 10**6 stays finite.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special, stats

from impatience.core.rng import Rng


class ErlangStats(NamedTuple):
    mean: float
    pdf: float
    cdf: float


def _check(k: int, mu: float, t: float) -> None:
    for name, value in (("k", k), ("mu", mu), ("t", t)):
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value}")
    if k < 0 or int(k) != k:
        raise ValueError(f"k must be a non-negative integer, got {k}")
    if mu <= 0.0:
        raise ValueError(f"mu must be positive, got {mu}")


@dataclass(frozen=True, slots=True)
class ErlangWait:
    """Remaining work of ``k`` jobs served at rate ``mu``; ``k = 0`` is a point mass at zero."""

    k: int
    mu: float

    def __post_init__(self) -> None:
        _check(self.k, self.mu, 0.0)

    @property
    def mean(self) -> float:
        return self.k / self.mu

    def pdf(self, t: float) -> float:
        """Density of the continuous part (zero everywhere for the point mass)."""
        if self.k == 0 or t < 0.0:
            return 0.0
        return float(np.exp(stats.gamma.logpdf(t, a=self.k, scale=1.0 / self.mu)))

    def cdf(self, t: float) -> float:
        if t < 0.0:
            return 0.0
        if self.k == 0:
            return 1.0
        return float(special.gammainc(self.k, self.mu * t))

    def sf(self, t: float) -> float:
        if t < 0.0:
            return 1.0
        if self.k == 0:
            return 0.0
        return float(special.gammaincc(self.k, self.mu * t))

    def sample(self, rng: Rng, size: int | None = None) -> float | np.ndarray:
        if self.k == 0:
            return 0.0 if size is None else np.zeros(size)
        draws = rng.generator.gamma(self.k, 1.0 / self.mu, size)
        return float(draws) if size is None else draws


def erlang_stats(k: int, mu: float, t: float) -> ErlangStats:
    """Mean, density and distribution function of ``W(k)`` at ``t``."""
    _check(k, mu, t)
    if t < 0.0:
        raise ValueError(f"t must be non-negative, got {t}")
    wait = ErlangWait(int(k), mu)
    return ErlangStats(mean=wait.mean, pdf=wait.pdf(t), cdf=wait.cdf(t))


def renege_probability(k: int, mu: float, patience: float) -> float:
    """Probability that the wait behind ``k`` jobs exceeds the patience ``patience``."""
    _check(k, mu, patience)
    if patience < 0.0:
        raise ValueError(f"patience must be non-negative, got {patience}")
    return ErlangWait(int(k), mu).sf(patience)


def renege_fail_probability(k: int, mu: float, patience: float, elapsed: float) -> float:
    """``F_W(k)(T - t0)``: probability of starting service within the remaining patience.

    This is the distribution-function value exactly as the model writes it; the complementary
    "misses the deadline" probability is :func:`miss_deadline_probability`.
    """
    _check(k, mu, patience)
    if not math.isfinite(elapsed) or elapsed < 0.0:
        raise ValueError(f"elapsed time must be finite and non-negative, got {elapsed}")
    return ErlangWait(int(k), mu).cdf(max(patience - elapsed, 0.0))


def miss_deadline_probability(k: int, mu: float, patience: float, elapsed: float) -> float:
    """Probability that staying does not reach service before the remaining patience runs out."""
    return 1.0 - renege_fail_probability(k, mu, patience, elapsed)
