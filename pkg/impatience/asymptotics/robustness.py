"""Estimator robustness: sublinear error and decision agreement at growing backlogs."""
import logging

import numpy as np

from impatience.core.rng import Rng
from impatience.schemas.asymptotics import AgreementCurve, AgreementPoint, ErrorPoint, ErrorProfile
from impatience.schemas.feed import Observation
from impatience.simulation.feeds import InformationFeed

logger = logging.getLogger(__name__)


def _observe(k_i: int, k_j: int, mu_i: float, mu_j: float, patience: float) -> Observation:
    return Observation(k_i=k_i, k_j=k_j, mu_i=mu_i, mu_j=mu_j, remaining=patience, elapsed=0.0)


def sublinear_error_profile(
    feed: InformationFeed,
    grid: list[int],
    reps: int,
    rng: Rng,
    *,
    mu: float = 1.0,
    mu_other: float = 1.5,
    m: int = 3,
    patience: float = 2.0,
    tolerance: float = 0.1,
) -> ErrorProfile:
    """Distribution of ``|W_hat(n) - W(n)| / n`` with ``W(n) ~ Erlang(n, mu)``.

    The trend statistic is the least-squares slope of the median ratio against ``log n``. The
    profile passes when that slope is not positive and the last median, in units of the mean
    service time, is within ``tolerance``.
    """
    backlogs = [n for n in grid if n > 0]
    if len(backlogs) < 2:
        raise ValueError("the error profile needs at least two positive backlogs")
    points = []
    for n in backlogs:
        estimate = feed.estimate_wait(_observe(n, m, mu, mu_other, patience)).value
        truth = rng.generator.gamma(n, 1.0 / mu, reps)
        ratio = np.abs(estimate - truth) / n
        points.append(
            ErrorPoint(
                n=n,
                estimate=estimate,
                median_ratio=float(np.median(ratio)),
                mean_ratio=float(np.mean(ratio)),
                p90_ratio=float(np.percentile(ratio, 90.0)),
            )
        )
    medians = np.array([point.median_ratio for point in points])
    slope = float(np.polyfit(np.log(backlogs), medians, 1)[0])
    final = float(medians[-1] * mu)
    passed = slope <= 0.0 and final <= tolerance
    logger.info("Error profile (%s): slope %.4g, final scaled median %.4g", feed.provenance, slope, final)
    return ErrorProfile(provenance=feed.provenance, mu=mu, points=points, slope=slope, final_median_scaled=final, passed=passed)


def decision_agreement(
    first: InformationFeed,
    second: InformationFeed,
    grid: list[int],
    reps: int,
    rng: Rng,
    *,
    m: int = 3,
    mu_1: float = 1.0,
    mu_2: float = 1.5,
    patience: float = 2.0,
) -> AgreementCurve:
    """Agreement of ``sign(W_hat_1(n) - W_hat_2(m))`` between two feeds and with sampled truth."""
    points = []
    for n in grid:
        signs = []
        for feed in (first, second):
            own = feed.estimate_wait(_observe(n, m, mu_1, mu_2, patience)).value
            other = feed.estimate_wait(_observe(m, n, mu_2, mu_1, patience)).value
            signs.append(int(np.sign(own - other)))
        first_wait = rng.generator.gamma(n, 1.0 / mu_1, reps) if n > 0 else np.zeros(reps)
        second_wait = rng.generator.gamma(m, 1.0 / mu_2, reps) if m > 0 else np.zeros(reps)
        truth = np.sign(first_wait - second_wait).astype(int)
        points.append(
            AgreementPoint(
                n=n,
                feed_agreement=float(signs[0] == signs[1]),
                first_vs_truth=float(np.mean(truth == signs[0])),
                second_vs_truth=float(np.mean(truth == signs[1])),
                truth_switch_fraction=float(np.mean(first_wait > second_wait)),
                mean_sign=int(np.sign(n / mu_1 - m / mu_2)),
            )
        )
    return AgreementCurve(first=first.provenance, second=second.provenance, m=m, points=points)
