"""Confidence intervals and monotone fits."""
import numpy as np
from scipy import optimize, stats

BAND_SLACK = 1e-12


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion; ``(0, 1)`` without trials."""
    if trials == 0:
        return 0.0, 1.0
    if not 0 <= successes <= trials:
        raise ValueError(f"successes must lie in [0, {trials}], got {successes}")
    interval = stats.binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return float(interval.low), float(interval.high)


def isotonic_fit(values: np.ndarray, weights: np.ndarray | None = None, increasing: bool = True) -> np.ndarray:
    return optimize.isotonic_regression(np.asarray(values, dtype=float), weights=weights, increasing=increasing).x


def within_bands(fit: np.ndarray, low: np.ndarray, high: np.ndarray) -> bool:
    return bool(np.all(fit >= np.asarray(low) - BAND_SLACK) and np.all(fit <= np.asarray(high) + BAND_SLACK))
