"""Reinforcement-learning environment: one step is one decision of a tagged tenant.

The tagged tenant either reneges (terminal) or jockeys to the tail of the other queue, after
which the system advances by one event. Service start and patience expiry end the tenant's
episode too; a fresh tagged tenant then joins the same queues. Only the tagged tenant is
impatient; the other jobs wait for service.
"""
import logging
import math
from collections import deque
from dataclasses import dataclass

from impatience.core.patience import Patience, sample_patience
from impatience.core.rates import derive_service_rates, sample_delta_lambda
from impatience.core.rng import Rng
from impatience.learning.rewards import JOCKEY, RENEGE
from impatience.schemas.experiment import DEFAULT_LAMBDAS
from impatience.schemas.policy import EnvStep, PolicyState
from impatience.schemas.system import ConstantPatience, PatienceModel

logger = logging.getLogger(__name__)


@dataclass
class Job:
    work: float
    tagged: bool = False


class QueueEnvironment:
    def __init__(
        self,
        seed: int = 42,
        *,
        lambdas: tuple[float, ...] = DEFAULT_LAMBDAS,
        delta_fraction: float = 0.4,
        max_backlog: int = 256,
        patience_model: PatienceModel | None = None,
    ) -> None:
        self.seed = seed
        self.lambdas = tuple(lambdas)
        self.delta_fraction = delta_fraction
        self.max_backlog = max_backlog
        self.patience_model = patience_model or ConstantPatience()
        self.rng = Rng(seed)
        self.queues: tuple[deque[Job], deque[Job]] = (deque(), deque())
        self.arrival_rates = (0.0, 0.0)
        self.service_rates = (1.0, 1.0)
        self.tagged_queue = 0
        self.patience = Patience(1.0)

    def _backlog(self) -> int:
        # log-uniform on [1, max_backlog + 1), shifted so empty queues occur
        return int(math.exp(self.rng.uniform(0.0, math.log(self.max_backlog + 1)))) - 1

    def reset(self, episode: int) -> PolicyState:
        self.rng = Rng(self.seed, episode)
        lam = self.lambdas[self.rng.choice(len(self.lambdas))]
        delta = sample_delta_lambda(lam, self.delta_fraction, self.rng)
        self.arrival_rates = (lam / 2.0, lam / 2.0)
        self.service_rates = derive_service_rates(lam / 2.0, lam / 2.0, delta)
        for queue in (0, 1):
            mu = self.service_rates[queue]
            self.queues[queue].clear()
            self.queues[queue].extend(Job(self.rng.exponential(mu)) for _ in range(self._backlog()))
        logger.debug("episode %d: lambda=%s mu=%s lengths=%s", episode, lam, self.service_rates, self.lengths)
        return self._join()

    @property
    def lengths(self) -> tuple[int, int]:
        return len(self.queues[0]), len(self.queues[1])

    def _join(self) -> PolicyState:
        """Queue a fresh tagged tenant; one landing on an idle server is served at once."""
        while True:
            self.tagged_queue = self.rng.choice(2)
            self.patience = Patience(sample_patience(self.patience_model, self.rng))
            queue = self.queues[self.tagged_queue]
            queue.append(Job(self.rng.exponential(self.service_rates[self.tagged_queue]), tagged=True))
            if len(queue) > 1:
                return self.state()
            queue[0].tagged = False

    def _position(self) -> int:
        for index, job in enumerate(self.queues[self.tagged_queue]):
            if job.tagged:
                return index
        raise RuntimeError("tagged tenant is not queued")

    def state(self) -> PolicyState:
        queue = self.tagged_queue
        return PolicyState(
            k_i=self._position(),
            k_j=len(self.queues[1 - queue]),
            mu_i=self.service_rates[queue],
            mu_j=self.service_rates[1 - queue],
            T=self.patience.remaining,
        )

    def realized_wait(self) -> float:
        """Work ahead of the tagged tenant: its wait if it stayed put."""
        ahead = self.queues[self.tagged_queue]
        return math.fsum(job.work for job in list(ahead)[: self._position()])

    def _leave(self) -> None:
        queue = self.queues[self.tagged_queue]
        del queue[self._position()]

    def _advance(self) -> str | None:
        """Advance to the next event; returns the tagged tenant's outcome if it ended."""
        candidates = [(self.patience.remaining, "expiry", -1)]
        for queue in (0, 1):
            if self.queues[queue]:
                candidates.append((self.queues[queue][0].work, "departure", queue))
            candidates.append((self.rng.exponential(self.arrival_rates[queue]), "arrival", queue))
        dt, kind, queue = min(candidates, key=lambda item: item[0])
        for lane in self.queues:
            if lane:
                lane[0].work -= dt
        self.patience = self.patience.advance(dt)
        if kind == "expiry":
            self._leave()
            return "expired"
        if kind == "departure":
            self.queues[queue].popleft()
        else:
            self.queues[queue].append(Job(self.rng.exponential(self.service_rates[queue])))
        return "served" if self._position() == 0 else None

    def step(self, action: int) -> EnvStep:
        if action == RENEGE:
            self._leave()
            return EnvStep(state=self._join(), terminal=True, outcome="reneged")
        if action != JOCKEY:
            raise ValueError(f"unknown action {action}")
        origin = self.queues[self.tagged_queue]
        position = self._position()
        job = origin[position]
        del origin[position]
        self.tagged_queue = 1 - self.tagged_queue
        job.work = self.rng.exponential(self.service_rates[self.tagged_queue])
        self.queues[self.tagged_queue].append(job)
        outcome = "served" if self._position() == 0 else self._advance()
        if outcome is None:
            return EnvStep(state=self.state(), terminal=False, outcome="jockeyed")
        if outcome == "served":
            # the tagged job stays in service as an ordinary job
            self.queues[self.tagged_queue][0].tagged = False
        return EnvStep(state=self._join(), terminal=True, outcome=outcome)
