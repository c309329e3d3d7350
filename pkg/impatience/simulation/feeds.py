"""Information feeds guiding a waiting tenant's stay, renege or jockey decision.

Every feed answers for one observation (:meth:`InformationFeed.decide`) and for all waiting
requests of a review at once (:meth:`InformationFeed.decide_batch`).
"""
import logging
from abc import ABC, abstractmethod

import numpy as np

from impatience.core.errors import ConfigurationError, FeedError, UnboundedGrowthError
from impatience.learning.agent import ActorCritic
from impatience.learning.rewards import JOCKEY, RENEGE, greedy_action
from impatience.learning.training import WaitCalibration
from impatience.markov.erlang import renege_fail_probability
from impatience.markov.jockey import drain_rate, jockey_benefit_probability, landing_pmf, switch_outcome_probabilities
from impatience.markov.uniformization import TransientPmf, build_uniformized_chain
from impatience.schemas.experiment import FeedName, MarkovFeedConfig
from impatience.schemas.feed import Decision, FeedDecision, Observation, ObservationBatch, Provenance, WaitEstimate
from impatience.schemas.policy import PolicyState

logger = logging.getLogger(__name__)


class InformationFeed(ABC):
    provenance: Provenance

    @abstractmethod
    def decide_batch(self, batch: ObservationBatch) -> np.ndarray:
        """Decision codes (see :class:`Decision`) for every row of ``batch``."""

    def estimate_waits(self, batch: ObservationBatch) -> np.ndarray:
        """Remaining wait in the own queue for every row of ``batch``."""
        return np.array([self.estimate_wait(batch.row(i)).value for i in range(len(batch))])

    @abstractmethod
    def estimate_wait(self, obs: Observation) -> WaitEstimate: ...

    def decide(self, obs: Observation) -> FeedDecision:
        code = self.decide_batch(ObservationBatch.from_observations([obs]))[0]
        return FeedDecision(Decision(int(code)), self.estimate_wait(obs))


class MarkovFeed(InformationFeed):
    """Closed-form feed: Erlang waits in the own queue, gamma races for a switch.

    Rules in order: exhausted patience reneges; a switch whose benefit probability beats
    ``jockey_threshold`` and whose in-time probability beats staying jockeys; a request likely
    to outlast its patience reneges when local processing is quicker than the expected wait.
    Such a request jockeys instead only when the switch itself is unlikely to outlast its
    patience, so overflow never bounces between two full queues.

    ``lambda_tar`` only joins ahead of jockeys moving from queue i (0) into queue j (1). A target
    that never drains (``c mu_j <= lambda_tar``) is never worth a switch.
    """

    provenance: Provenance = "markov"

    def __init__(self, config: MarkovFeedConfig | None = None, *, lambda_tar: float = 0.0, t_local: float = 1.0) -> None:
        self.config = config or MarkovFeedConfig()
        self.lambda_tar = lambda_tar
        self.t_local = t_local
        self._landing: dict[tuple[int, float, float], TransientPmf | None] = {}
        self._benefit: dict[tuple[int, int, float, float, float], float] = {}

    def target_arrivals(self, queue: int) -> float:
        """Arrival rate joining ahead of a jockey leaving ``queue``."""
        return self.lambda_tar if queue == 0 else 0.0

    def _landing_pmf(self, k_j: int, mu_j: float, lambda_tar: float) -> TransientPmf | None:
        key = (k_j, mu_j, lambda_tar)
        if key not in self._landing:
            try:
                drain_rate(mu_j, lambda_tar, self.config.target_servers)
                if self.config.transit_time == 0.0:
                    pmf = TransientPmf.point_mass(k_j)
                else:
                    chain = build_uniformized_chain(lambda_tar, mu_j, self.config.eps, min_states=k_j + 1)
                    pmf = landing_pmf(k_j, chain, self.config.transit_time, self.config.eps)
            except UnboundedGrowthError as exc:
                logger.debug("No switch into an undrained target: %s", exc)
                pmf = None
            self._landing[key] = pmf
        return self._landing[key]

    def switch_probabilities(self, obs: Observation) -> tuple[float, float]:
        """Benefit and in-time probabilities of switching now."""
        lambda_tar = self.target_arrivals(obs.queue)
        pmf = self._landing_pmf(obs.k_j, obs.mu_j, lambda_tar)
        if pmf is None:
            return 0.0, 0.0
        servers = self.config.target_servers
        key = (obs.k_i, obs.k_j, obs.mu_i, obs.mu_j, lambda_tar)
        if key not in self._benefit:
            self._benefit[key] = jockey_benefit_probability(obs.k_i, obs.mu_i, pmf, obs.mu_j, lambda_tar, servers)
        outcome = switch_outcome_probabilities(pmf, obs.mu_j, lambda_tar, max(obs.remaining, 0.0), 0.0, servers)
        return self._benefit[key], outcome.success

    def _decide(self, obs: Observation) -> Decision:
        if obs.remaining <= 0.0:
            return Decision.RENEGE
        stay_in_time = renege_fail_probability(obs.k_i, obs.mu_i, obs.remaining, 0.0)
        renege_due = 1.0 - stay_in_time > self.config.renege_threshold and obs.k_i / obs.mu_i > self.t_local
        benefit, switch_in_time = self.switch_probabilities(obs)
        if benefit > self.config.jockey_threshold and switch_in_time > stay_in_time:
            # a request due to renege only moves into a queue it would join as a fresh arrival
            if not renege_due or 1.0 - switch_in_time <= self.config.renege_threshold:
                return Decision.JOCKEY
        return Decision.RENEGE if renege_due else Decision.STAY

    def decide_batch(self, batch: ObservationBatch) -> np.ndarray:
        return np.array([int(self._decide(batch.row(i))) for i in range(len(batch))], dtype=np.int64)

    def estimate_wait(self, obs: Observation) -> WaitEstimate:
        return WaitEstimate(value=obs.k_i / obs.mu_i, provenance="markov")

    def estimate_waits(self, batch: ObservationBatch) -> np.ndarray:
        return batch.k_i / batch.mu_i


class LearnedFeed(InformationFeed):
    """Trained actor-critic: the greedy action is taken only when the policy's preferred
    move is also affordable, otherwise the tenant stays.

    A jockey is taken when the greedy action is to jockey and the calibrated wait in the other
    queue is shorter; a renege when the greedy action is to renege and the calibrated own wait
    exceeds the remaining patience.
    """

    provenance: Provenance = "learned"

    def __init__(self, agent: ActorCritic, calibration: WaitCalibration | None) -> None:
        if calibration is None:
            raise FeedError("learned feed needs a calibrated critic")
        self.agent = agent
        self.calibration = calibration

    def _states(self, batch: ObservationBatch) -> list[PolicyState]:
        return [
            PolicyState(
                k_i=int(batch.k_i[i]),
                k_j=int(batch.k_j[i]),
                mu_i=float(batch.mu_i[i]),
                mu_j=float(batch.mu_j[i]),
                T=float(max(batch.remaining[i], 0.0)),
            )
            for i in range(len(batch))
        ]

    def _waits(self, states: list[PolicyState]) -> np.ndarray:
        k = np.array([state.k_i for state in states], dtype=float)
        mu = np.array([state.mu_i for state in states], dtype=float)
        return np.where(k == 0, 0.0, self.calibration.apply(k, mu, self.agent.values(states)))

    def decide_batch(self, batch: ObservationBatch) -> np.ndarray:
        decisions = np.full(len(batch), int(Decision.STAY), dtype=np.int64)
        if len(batch) == 0:
            return decisions
        states = self._states(batch)
        own = self._waits(states)
        other = self._waits([state.swapped() for state in states])
        greedy = np.array([greedy_action(p[RENEGE], p[JOCKEY]) for p in self.agent.policies(states)])
        jockey = (greedy == JOCKEY) & (other < own)
        renege = (greedy == RENEGE) & (own > batch.remaining)
        decisions[renege] = int(Decision.RENEGE)
        decisions[jockey] = int(Decision.JOCKEY)
        decisions[batch.remaining <= 0.0] = int(Decision.RENEGE)
        return decisions

    def estimate_wait(self, obs: Observation) -> WaitEstimate:
        return WaitEstimate(value=float(self.estimate_waits(ObservationBatch.from_observations([obs]))[0]), provenance="learned")

    def estimate_waits(self, batch: ObservationBatch) -> np.ndarray:
        return self._waits(self._states(batch))


class NeverActFeed(InformationFeed):
    """Tenants always stay; only patience expiry removes them."""

    provenance: Provenance = "baseline"

    def decide_batch(self, batch: ObservationBatch) -> np.ndarray:
        return np.full(len(batch), int(Decision.STAY), dtype=np.int64)

    def estimate_wait(self, obs: Observation) -> WaitEstimate:
        return WaitEstimate(value=obs.k_i / obs.mu_i, provenance="baseline")


class ZeroEstimateFeed(NeverActFeed):
    """Debug estimator reporting a zero wait whatever the backlog."""

    provenance: Provenance = "debug-zero"

    def estimate_wait(self, obs: Observation) -> WaitEstimate:
        return WaitEstimate(value=0.0, provenance="debug-zero")

    def estimate_waits(self, batch: ObservationBatch) -> np.ndarray:
        return np.zeros(len(batch))


def make_feed(
    name: FeedName,
    *,
    markov: MarkovFeedConfig | None = None,
    lambda_tar: float = 0.0,
    t_local: float = 1.0,
    agent: ActorCritic | None = None,
    calibration: WaitCalibration | None = None,
) -> InformationFeed:
    """Build a fresh feed instance by name."""
    if name == "markov":
        return MarkovFeed(markov, lambda_tar=lambda_tar, t_local=t_local)
    if name == "learned":
        if agent is None:
            raise ConfigurationError("the learned feed needs a trained checkpoint")
        return LearnedFeed(agent, calibration)
    if name == "baseline":
        return NeverActFeed()
    if name == "debug-zero":
        return ZeroEstimateFeed()
    raise ConfigurationError(f"unknown feed {name!r}")
