"""Online training loop and the critic-to-wait calibration."""
import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from impatience.core.errors import DivergenceError, FeedError
from impatience.core.rng import Rng
from impatience.learning.agent import ActorCritic, Transition
from impatience.learning.rewards import reward
from impatience.schemas.feed import WaitEstimate
from impatience.schemas.policy import EnvStep, EpisodeLoss, PolicyState, TrainerConfig

logger = logging.getLogger(__name__)

ACTION_STREAM = 1


class Environment(Protocol):
    def reset(self, episode: int) -> PolicyState: ...

    def step(self, action: int) -> EnvStep: ...

    def realized_wait(self) -> float: ...


@dataclass(frozen=True)
class WaitCalibration:
    """Remaining wait as ``k_i * max(slope * V(s) + intercept / mu_i, 0)``.

    ``slope = 0, intercept = 1`` is the Markov mean ``k_i / mu_i``; the critic only moves the
    estimate away from it where its values explain the realized waits.
    """

    slope: float
    intercept: float

    @classmethod
    def fit(cls, agent: ActorCritic, states: Sequence[PolicyState], waits: Sequence[float]) -> "WaitCalibration":
        """Least squares of the per-job wait ``wait / k_i`` on ``(V(s), 1 / mu_i)`` over non-empty queues."""
        backlog = np.array([state.k_i for state in states], dtype=float)
        keep = backlog > 0
        if np.count_nonzero(keep) < 2:
            raise FeedError("calibration needs at least two samples with a non-empty queue")
        kept = [state for state, flag in zip(states, keep) if flag]
        rates = np.array([state.mu_i for state in kept], dtype=float)
        design = np.column_stack([agent.values(kept), 1.0 / rates])
        target = np.asarray(waits, dtype=float)[keep] / backlog[keep]
        (slope, intercept), *_ = np.linalg.lstsq(design, target, rcond=None)
        return cls(float(slope), float(intercept))

    def apply(self, k_i: np.ndarray, mu_i: np.ndarray, values: np.ndarray) -> np.ndarray:
        per_job = np.maximum(self.slope * np.asarray(values) + self.intercept / np.asarray(mu_i, dtype=float), 0.0)
        return np.asarray(k_i, dtype=float) * per_job

    def residual(self, agent: ActorCritic, states: Sequence[PolicyState], waits: Sequence[float]) -> float:
        """Root mean square of the per-job error ``(estimate - wait) / max(k_i, 1)``."""
        backlog = np.array([state.k_i for state in states], dtype=float)
        rates = np.array([state.mu_i for state in states], dtype=float)
        estimate = self.apply(backlog, rates, agent.values(states))
        error = (estimate - np.asarray(waits, dtype=float)) / np.maximum(backlog, 1.0)
        return float(np.sqrt(np.mean(error**2)))


@dataclass
class CalibrationSamples:
    states: list[PolicyState] = field(default_factory=list)
    waits: list[float] = field(default_factory=list)

    def add(self, state: PolicyState, wait: float) -> None:
        self.states.append(state)
        self.waits.append(wait)


@dataclass
class TrainingResult:
    agent: ActorCritic
    losses: list[EpisodeLoss]
    calibration: WaitCalibration
    samples: CalibrationSamples


def train(
    env: Environment,
    config: TrainerConfig,
    agent: ActorCritic | None = None,
    start_episode: int = 0,
) -> TrainingResult:
    """Run ``episodes x epochs`` steps of act, environment step and TD update.

    A resumed run passes the restored ``agent`` and the next ``start_episode`` so episode
    numbering continues.
    """
    agent = agent or ActorCritic(config)
    rng = Rng(config.seed, ACTION_STREAM).spawn(ACTION_STREAM + start_episode)
    samples = CalibrationSamples()
    losses: list[EpisodeLoss] = []
    for episode in range(start_episode, start_episode + config.episodes):
        state = env.reset(episode)
        actor_losses, critic_losses = [], []
        for epoch in range(config.epochs_per_episode):
            samples.add(state, env.realized_wait())
            action, pi = agent.act(state, rng)
            r = reward(state, action, pi, config.tau)
            step = env.step(action)
            try:
                result = agent.td_update(Transition(state, action, r, step.state, step.terminal))
            except DivergenceError as exc:
                exc.details.update(episode=episode, epoch=epoch)
                logger.error("Training diverged at episode %d epoch %d: %s", episode, epoch, exc)
                raise
            actor_losses.append(result.actor_loss)
            critic_losses.append(result.critic_loss)
            state = step.state
        record = EpisodeLoss(
            episode=episode,
            actor_loss=float(np.mean(actor_losses)),
            critic_loss=float(np.mean(critic_losses)),
        )
        losses.append(record)
        if (episode + 1) % 10 == 0:
            logger.info(
                "Episode %d: actor loss %.6g, critic loss %.6g",
                episode,
                record.actor_loss,
                record.critic_loss,
            )
    calibration = WaitCalibration.fit(agent, samples.states, samples.waits)
    logger.info("Calibrated critic: slope %.6g, intercept %.6g", calibration.slope, calibration.intercept)
    return TrainingResult(agent, losses, calibration, samples)


def estimate_wait(state: PolicyState, agent: ActorCritic, calibration: WaitCalibration | None) -> WaitEstimate:
    if calibration is None:
        raise FeedError("critic has no wait calibration")
    if state.k_i == 0:
        return WaitEstimate(value=0.0, provenance="learned")
    value = float(calibration.apply(np.array([state.k_i]), np.array([state.mu_i]), np.array([agent.value(state)]))[0])
    return WaitEstimate(value=value, provenance="learned")


def loss_improved(losses: Sequence[EpisodeLoss], head: int = 10, tail: int = 20) -> bool:
    """Mean combined loss of the last ``tail`` episodes is below that of the first ``head``."""
    if len(losses) < max(head, tail):
        raise ValueError(f"need at least {max(head, tail)} episodes, got {len(losses)}")
    combined = [item.actor_loss + item.critic_loss for item in losses]
    return float(np.mean(combined[-tail:])) < float(np.mean(combined[:head]))
