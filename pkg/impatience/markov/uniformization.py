"""Uniformized birth-death chain of the target queue and its transient occupancy.

The target queue seen by a jockey has arrivals ahead of it at rate ``lambda_tar`` and two
servers of rate ``mu`` (death rate ``min(n, 2) mu``). Uniformizing at ``q = lambda_tar + 2 mu``
turns the generator into a tri-diagonal one-step matrix ``P``; the transient distribution is
the Poisson mixture ``sum_m e^{-qt} (qt)^m / m! * pi0 P^m``.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, sparse, stats

from impatience.core.errors import NumericalError, SeriesOverflowError, UnboundedGrowthError

logger = logging.getLogger(__name__)

SERVERS = 2
DEFAULT_EPS = 1e-9
MAX_TERMS = 1_000_000
MAX_STATES = 1 << 22
_MIN_STATES = 8


@dataclass(frozen=True)
class UniformizedChain:
    """One-step matrix ``P`` on occupancies ``0..n_max``.

    Rows are stochastic: at ``n_max`` the upward probability is folded into the self-loop.
    Transient propagation uses :attr:`substochastic` instead, where that probability leaves the
    state space, so discarded mass is accounted for instead of being misplaced.
    """

    lambda_tar: float
    mu: float
    q: float
    n_max: int
    P: sparse.csr_matrix = field(repr=False)
    c: int = SERVERS

    @property
    def states(self) -> int:
        return self.n_max + 1

    @property
    def boundary_leak(self) -> float:
        return self.lambda_tar / self.q

    @property
    def substochastic(self) -> sparse.csr_matrix:
        correction = sparse.csr_matrix(
            ([self.boundary_leak], ([self.n_max], [self.n_max])), shape=self.P.shape
        )
        return (self.P - correction).tocsr()

    def generator(self) -> np.ndarray:
        """Dense generator ``q (P - I)`` of the truncated, reflecting chain."""
        return self.q * (self.P.toarray() - np.eye(self.states))

    def resized(self, n_max: int) -> "UniformizedChain":
        return build_uniformized_chain(self.lambda_tar, self.mu, n_max=n_max)


@dataclass(frozen=True)
class TransientPmf:
    """Occupancy mass at time ``t`` over ``k = 0..len(mass) - 1``."""

    t: float
    mass: np.ndarray = field(repr=False)
    truncation_error: float = 0.0

    @property
    def total(self) -> float:
        return float(self.mass.sum())

    def __getitem__(self, k: int) -> float:
        return float(self.mass[k]) if 0 <= k < self.mass.size else 0.0

    @classmethod
    def point_mass(cls, k: int, t: float = 0.0) -> "TransientPmf":
        mass = np.zeros(k + 1)
        mass[k] = 1.0
        return cls(t=t, mass=mass, truncation_error=0.0)


def _stationary_tail(rho: float, n: int) -> float:
    """Stationary M/M/2 mass above ``n``: ``2 pi0 rho^(n+1) / (1 - rho)``."""
    if rho == 0.0:
        return 0.0
    log_tail = math.log(2.0) + math.log(_empty_probability(rho)) + (n + 1) * math.log(rho) - math.log1p(-rho)
    return math.exp(log_tail)


def _empty_probability(rho: float) -> float:
    return 1.0 / (1.0 + 2.0 * rho + 2.0 * rho * rho / (1.0 - rho))


def _tail_level(rho: float, eps: float, floor: int) -> int:
    n = max(_MIN_STATES, floor)
    while _stationary_tail(rho, n) >= eps:
        n *= 2
        if n > MAX_STATES:
            raise NumericalError("stationary tail does not fall below eps", rho=rho, eps=eps)
    return n


def build_uniformized_chain(
    lambda_tar: float,
    mu: float,
    eps: float = DEFAULT_EPS,
    n_max: int | None = None,
    min_states: int = 0,
) -> UniformizedChain:
    """Build the uniformized chain, truncated where the stationary tail drops below ``eps``.

    With an explicit ``n_max`` no stationary form is needed, so ``lambda_tar >= 2 mu`` is allowed.
    """
    if not math.isfinite(lambda_tar) or lambda_tar < 0.0:
        raise ValueError(f"lambda_tar must be non-negative, got {lambda_tar}")
    if not math.isfinite(mu) or mu <= 0.0:
        raise ValueError(f"mu must be positive, got {mu}")
    if n_max is None:
        if lambda_tar >= SERVERS * mu:
            raise UnboundedGrowthError(
                "arrivals ahead of the jockey outpace both servers; pass n_max for a finite horizon",
                lambda_tar=lambda_tar,
                mu=mu,
            )
        n_max = _tail_level(lambda_tar / (SERVERS * mu), eps, min_states)
    elif n_max < 1:
        raise ValueError(f"n_max must be at least 1, got {n_max}")

    q = lambda_tar + SERVERS * mu
    states = np.arange(n_max + 1)
    up = np.full(n_max, lambda_tar / q)
    down = np.minimum(states[1:], SERVERS) * mu / q
    diag = 1.0 - np.concatenate([up, [0.0]]) - np.concatenate([[0.0], down])
    P = sparse.diags([down, diag, up], offsets=[-1, 0, 1], shape=(n_max + 1, n_max + 1), format="csr")
    logger.debug("uniformized chain: lambda_tar=%s mu=%s q=%s n_max=%d", lambda_tar, mu, q, n_max)
    return UniformizedChain(lambda_tar=lambda_tar, mu=mu, q=q, n_max=n_max, P=P)


def initial_distribution(rho: float, eps: float = DEFAULT_EPS, n_max: int | None = None) -> np.ndarray:
    """Stationary M/M/2 occupancy used as ``pi^(0)``.

    Entry 0 is ``(1 + 2 rho + 2 rho^2 / (1 - rho))^-1`` and entry ``n >= 1`` is ``2 rho^n`` times it.
    The vector stops where the tail is below ``eps``; the discarded tail is added to the last
    entry so the vector sums to one.
    """
    if not math.isfinite(rho) or rho < 0.0:
        raise ValueError(f"rho must be non-negative, got {rho}")
    if rho >= 1.0:
        raise UnboundedGrowthError("no stationary distribution for rho >= 1; supply pi0 explicitly", rho=rho)
    level = _tail_level(rho, eps, 0) if n_max is None else n_max
    pi = np.zeros(level + 1)
    p0 = _empty_probability(rho)
    pi[0] = p0
    if rho > 0.0:
        n = np.arange(1, level + 1)
        pi[1:] = np.exp(math.log(2.0 * p0) + n * math.log(rho))
    pi[-1] += max(1.0 - pi.sum(), 0.0)
    return pi


def _pad(vector: np.ndarray, size: int) -> np.ndarray:
    padded = np.zeros(size)
    padded[: vector.size] = vector
    return padded


def transient_pmf(
    chain: UniformizedChain,
    pi0: np.ndarray,
    t: float,
    eps: float = DEFAULT_EPS,
    max_terms: int = MAX_TERMS,
) -> TransientPmf:
    """Occupancy distribution after ``t`` by uniformization.

    The Poisson series stops once its cumulative weight reaches ``1 - eps``; if the boundary
    leaks more than ``eps`` the state space is doubled and the series recomputed.
    ``sum(mass) + truncation_error`` equals one up to rounding.
    """
    pi0 = np.asarray(pi0, dtype=float)
    if pi0.ndim != 1 or np.any(pi0 < 0.0) or not np.all(np.isfinite(pi0)):
        raise ValueError("pi0 must be a finite, non-negative vector")
    if abs(pi0.sum() - 1.0) > 1e-9:
        raise ValueError(f"pi0 must sum to one, got {pi0.sum()}")
    if not math.isfinite(t) or t < 0.0:
        raise ValueError(f"t must be non-negative, got {t}")
    if t == 0.0:
        return TransientPmf(t=0.0, mass=pi0.copy(), truncation_error=0.0)

    qt = chain.q * t
    last = int(stats.poisson.isf(eps, qt))
    if last > max_terms:
        raise SeriesOverflowError(
            "Poisson mixture needs too many terms; raise eps or step through time",
            terms=last,
            max_terms=max_terms,
            qt=qt,
        )
    weights = stats.poisson.pmf(np.arange(last + 1), qt)
    poisson_tail = float(stats.poisson.sf(last, qt))

    current = chain
    if pi0.size > current.states:
        current = current.resized(pi0.size - 1)
    while True:
        PT = current.substochastic.T.tocsr()
        v = _pad(pi0, current.states)
        start = v.sum()
        acc = np.zeros(current.states)
        leak = 0.0
        for weight in weights:
            acc += weight * v
            leak += weight * (start - v.sum())
            v = PT @ v
        if leak <= eps or current.lambda_tar == 0.0:
            break
        if current.states * 2 > MAX_STATES:
            raise NumericalError("state truncation keeps leaking mass", leak=leak, n_max=current.n_max)
        logger.debug("boundary leak %.3g > eps at n_max=%d; doubling", leak, current.n_max)
        current = current.resized(current.n_max * 2)

    return TransientPmf(t=t, mass=acc, truncation_error=poisson_tail + max(leak, 0.0))


def transient_pmf_dense(chain: UniformizedChain, pi0: np.ndarray, t: float) -> np.ndarray:
    """Reference ``pi0 expm(Q t)`` on the truncated state space (small chains only)."""
    pi0 = _pad(np.asarray(pi0, dtype=float), chain.states)
    return pi0 @ linalg.expm(chain.generator() * t)
