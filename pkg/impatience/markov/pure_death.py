"""Pure-death target queue: no arrivals join ahead of a jockey in transit."""
import numpy as np
from scipy import stats


def _check(n: int, mu: float, t: float = 0.0) -> None:
    if n < 0 or int(n) != n:
        raise ValueError(f"n must be a non-negative integer, got {n}")
    if not np.isfinite(mu) or mu <= 0.0:
        raise ValueError(f"mu must be positive and finite, got {mu}")
    if not np.isfinite(t) or t < 0.0:
        raise ValueError(f"t must be non-negative and finite, got {t}")


def pure_death_pmf(n: int, mu: float, t: float) -> np.ndarray:
    """Occupancy after ``t`` when each of ``n`` customers leaves independently at rate ``mu``.

    Returns the Binomial(n, exp(-mu t)) mass over ``k = 0..n``, computed from log-masses.
    """
    _check(n, mu, t)
    survival = float(np.exp(-mu * t))
    support = np.arange(int(n) + 1)
    if survival >= 1.0:
        mass = np.zeros(int(n) + 1)
        mass[-1] = 1.0
        return mass
    return np.exp(stats.binom.logpmf(support, int(n), survival))


def pure_death_jockey_time(n: int, mu: float) -> float:
    """Expected time from landing state ``n`` to service start: ``(n - 1) / (2 mu)``, zero for n < 2."""
    _check(n, mu)
    if n < 2:
        return 0.0
    return (n - 1) / (2.0 * mu)


def expected_pure_death_jockey_time(n: int, mu: float, t: float) -> float:
    """Jockey time averaged over the occupancy left after a transit of length ``t``."""
    mass = pure_death_pmf(n, mu, t)
    waits = np.maximum(np.arange(mass.size) - 1, 0) / (2.0 * mu)
    return float(mass @ waits)
