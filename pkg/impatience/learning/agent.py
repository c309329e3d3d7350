"""Two-network actor-critic agent with one-step temporal-difference updates."""
import logging
import math
from collections.abc import Sequence
from typing import NamedTuple

import numpy as np
import torch
from torch import nn

from impatience.core.errors import DivergenceError
from impatience.core.rng import Rng
from impatience.learning.networks import DTYPE, ActorNetwork, CriticNetwork
from impatience.learning.rewards import JOCKEY, RENEGE
from impatience.schemas.policy import FeatureScale, PolicyState, TrainerConfig

logger = logging.getLogger(__name__)


class Transition(NamedTuple):
    state: PolicyState
    action: int
    reward: float
    next_state: PolicyState
    terminal: bool


class TDLosses(NamedTuple):
    actor_loss: float
    critic_loss: float


def feature_tensor(states: PolicyState | Sequence[PolicyState], scale: FeatureScale) -> torch.Tensor:
    if isinstance(states, PolicyState):
        return torch.tensor(states.features(scale), dtype=DTYPE)
    return torch.tensor([state.features(scale) for state in states], dtype=DTYPE).reshape(-1, 5)


def act(
    state: PolicyState,
    actor: nn.Module,
    rng: Rng,
    scale: FeatureScale | None = None,
) -> tuple[int, float]:
    """Sample an action from the actor's softmax and return it with its probability."""
    with torch.no_grad():
        probs = actor(feature_tensor(state, scale or FeatureScale())).double().numpy()
    if not np.all(np.isfinite(probs)):
        raise DivergenceError("actor produced non-finite probabilities", state=state.model_dump())
    action = JOCKEY if rng.random() < probs[JOCKEY] else RENEGE
    return action, float(probs[action])


def td_losses(
    transition: Transition,
    actor: ActorNetwork,
    critic: CriticNetwork,
    gamma: float,
    scale: FeatureScale | None = None,
) -> tuple[torch.Tensor, torch.Tensor]:
    """Differentiable actor and critic losses of one transition.

    The critic regresses ``V(s)`` on the target ``r + gamma V(s')`` (just ``r`` when terminal),
    with the bootstrap held constant. The actor loss is ``-log pi(a|s)`` weighted by the detached
    advantage ``target - V(s)``.
    """
    scale = scale or FeatureScale()
    value = critic(feature_tensor(transition.state, scale))
    if transition.terminal:
        target = torch.tensor(transition.reward, dtype=DTYPE)
    else:
        with torch.no_grad():
            target = transition.reward + gamma * critic(feature_tensor(transition.next_state, scale))
    critic_loss = (value - target) ** 2
    advantage = (target - value).detach()
    log_pi = actor.log_probs(feature_tensor(transition.state, scale))[transition.action]
    actor_loss = -log_pi * advantage
    return actor_loss, critic_loss


class ActorCritic:
    """Actor, critic and their Adam optimizers."""

    def __init__(self, config: TrainerConfig) -> None:
        self.config = config
        with torch.random.fork_rng(devices=[]):
            torch.manual_seed(config.seed)
            self.actor = ActorNetwork(config.hidden_units)
            self.critic = CriticNetwork(config.hidden_units)
        self.actor_optimizer = self._adam(self.actor)
        self.critic_optimizer = self._adam(self.critic)

    def _adam(self, network: nn.Module) -> torch.optim.Adam:
        cfg = self.config
        return torch.optim.Adam(
            network.parameters(),
            lr=cfg.learning_rate,
            betas=(cfg.beta1, cfg.beta2),
            eps=cfg.adam_eps,
        )

    @property
    def scale(self) -> FeatureScale:
        return self.config.feature_scale

    def act(self, state: PolicyState, rng: Rng) -> tuple[int, float]:
        return act(state, self.actor, rng, self.scale)

    def policy(self, state: PolicyState) -> np.ndarray:
        with torch.no_grad():
            return self.actor(feature_tensor(state, self.scale)).numpy()

    def policies(self, states: Sequence[PolicyState]) -> np.ndarray:
        if not states:
            return np.zeros((0, 2))
        with torch.no_grad():
            return self.actor(feature_tensor(states, self.scale)).numpy()

    def values(self, states: Sequence[PolicyState]) -> np.ndarray:
        if not states:
            return np.zeros(0)
        with torch.no_grad():
            return self.critic(feature_tensor(states, self.scale)).numpy()

    def value(self, state: PolicyState) -> float:
        return float(self.values([state])[0])

    def td_update(self, transition: Transition) -> TDLosses:
        """Apply one Adam step to each network and return both losses."""
        actor_loss, critic_loss = td_losses(
            transition, self.actor, self.critic, self.config.gamma, self.scale
        )
        losses = TDLosses(actor_loss.item(), critic_loss.item())
        if not (math.isfinite(losses.actor_loss) and math.isfinite(losses.critic_loss)):
            raise DivergenceError(
                "non-finite loss", actor_loss=losses.actor_loss, critic_loss=losses.critic_loss
            )
        self.actor_optimizer.zero_grad()
        self.critic_optimizer.zero_grad()
        (actor_loss + critic_loss).backward()
        for name, network in (("actor", self.actor), ("critic", self.critic)):
            for parameter in network.parameters():
                if parameter.grad is not None and not torch.isfinite(parameter.grad).all():
                    raise DivergenceError("non-finite gradient", network=name)
        self.actor_optimizer.step()
        self.critic_optimizer.step()
        return losses
