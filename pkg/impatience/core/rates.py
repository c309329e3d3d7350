"""Arrival/service rate derivation and utilization."""
import logging
from typing import NamedTuple

from impatience.core.errors import ConfigurationError, InfeasibleRatesError
from impatience.core.rng import Rng

logger = logging.getLogger(__name__)


class Utilization(NamedTuple):
    rho: float
    stable: bool


def derive_service_rates(lambda_i: float, lambda_j: float, delta_lambda: float) -> tuple[float, float]:
    """Split the total arrival rate into per-queue service rates around ``delta_lambda``.

    ``mu_i = (lambda_i + delta_lambda) / 2`` and ``mu_j = (lambda_j - delta_lambda) / 2``.
    Only positivity of the derived rates is enforced beyond the open interval
    ``(-lambda_total, lambda_total)``.
    """
    lambda_total = lambda_i + lambda_j
    if not -lambda_total < delta_lambda < lambda_total:
        raise InfeasibleRatesError(
            "delta_lambda must lie strictly inside (-lambda_total, lambda_total)",
            delta_lambda=delta_lambda,
            lambda_total=lambda_total,
        )
    mu_i = (lambda_i + delta_lambda) / 2.0
    mu_j = (lambda_j - delta_lambda) / 2.0
    if mu_i <= 0.0 or mu_j <= 0.0:
        raise InfeasibleRatesError(
            "heterogeneity offset yields a non-positive service rate",
            mu_i=mu_i,
            mu_j=mu_j,
            delta_lambda=delta_lambda,
        )
    return mu_i, mu_j


def utilization(lam: float, c: int, mu: float) -> Utilization:
    """Return ``lambda / (c mu)`` with a stability flag. Unstable values are only flagged."""
    if mu <= 0.0:
        raise ConfigurationError("service rate must be positive", mu=mu)
    if c < 1:
        raise ConfigurationError("server count must be at least one", c=c)
    if lam < 0.0:
        raise ConfigurationError("arrival rate must be non-negative", lam=lam)
    rho = lam / (c * mu)
    if rho >= 1.0:
        logger.warning("Utilization %.4f >= 1 (lambda=%s, c=%s, mu=%s); the queue grows without bound", rho, lam, c, mu)
    return Utilization(rho=rho, stable=rho < 1.0)


def sample_delta_lambda(
    lambda_total: float,
    fraction: float,
    rng: Rng,
    fixed: float | None = None,
) -> float:
    """Draw the heterogeneity offset uniformly on ``(-fraction*lambda, fraction*lambda)``.

    ``fixed`` overrides the draw, keeping experiments reproducible with a pinned value.
    """
    if fixed is not None:
        return fixed
    if not 0.0 < fraction < 1.0:
        raise ConfigurationError("delta fraction must lie in (0, 1)", fraction=fraction)
    bound = fraction * lambda_total
    return rng.uniform(-bound, bound)
