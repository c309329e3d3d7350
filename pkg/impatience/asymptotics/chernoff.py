"""Large-deviation bound for means of exponential samples."""
import logging

import numpy as np
from scipy import special

from impatience.core.rng import Rng
from impatience.schemas.asymptotics import ChernoffReport, ChernoffRow

logger = logging.getLogger(__name__)

SE_SLACK = 3.0


def rate_function(x: float | np.ndarray) -> float | np.ndarray:
    """``I(x) = x - 1 - ln x`` on ``x > 0``; zero only at ``x = 1``."""
    values = np.asarray(x, dtype=float)
    if np.any(values <= 0.0) or not np.all(np.isfinite(values)):
        raise ValueError("the rate function is defined for finite x > 0")
    result = values - 1.0 - np.log(values)
    return float(result) if result.ndim == 0 else result


def _convex_with_minimum_at_one() -> bool:
    grid = np.linspace(0.05, 5.0, 1001)
    values = rate_function(grid)
    curvature = values[2:] - 2.0 * values[1:-1] + values[:-2]
    return bool(np.all(curvature > 0.0) and np.all(values >= 0.0) and abs(grid[np.argmin(values)] - 1.0) < 0.01)


def chernoff_check(mu: float, n_grid: list[int], x_grid: list[float], reps: int, rng: Rng) -> ChernoffReport:
    """Compare empirical tails of ``S_n / n`` for Exp(mu) samples with ``exp(-n I(x mu))``.

    ``x mu > 1`` checks the upper tail ``Pr{S_n/n >= x}``, ``x mu < 1`` the lower tail
    ``Pr{S_n/n <= x}``. An empirical tail passes when it stays below the bound plus three
    standard errors; the exact Erlang tail is reported alongside.
    """
    if mu <= 0.0 or reps < 1:
        raise ValueError(f"need mu > 0 and reps >= 1, got mu={mu}, reps={reps}")
    rows = []
    for n in n_grid:
        means = rng.generator.gamma(n, 1.0 / mu, reps) / n
        for x in x_grid:
            scaled = x * mu
            if scaled == 1.0:
                continue
            rate = rate_function(scaled)
            bound = float(np.exp(-n * rate))
            if scaled > 1.0:
                tail = "upper"
                empirical = float(np.mean(means >= x))
                exact = float(special.gammaincc(n, n * scaled))
            else:
                tail = "lower"
                empirical = float(np.mean(means <= x))
                exact = float(special.gammainc(n, n * scaled))
            standard_error = float(np.sqrt(empirical * (1.0 - empirical) / reps))
            passed = empirical <= bound + SE_SLACK * standard_error and exact <= bound
            if not passed:
                logger.warning("Chernoff bound exceeded at n=%d x=%s: %s > %s", n, x, empirical, bound)
            rows.append(
                ChernoffRow(
                    n=n,
                    x=x,
                    tail=tail,
                    rate=rate,
                    bound=bound,
                    exact=exact,
                    empirical=empirical,
                    standard_error=standard_error,
                    passed=passed,
                )
            )
    return ChernoffReport(mu=mu, rate_at_one=rate_function(1.0), convex=_convex_with_minimum_at_one(), rows=rows)
