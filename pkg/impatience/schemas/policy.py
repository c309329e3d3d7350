"""Actor-critic state, feature scaling and trainer configuration."""
from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator


class FeatureScale(BaseModel):
    """Fixed divisors mapping ``(k_i, k_j, mu_i, mu_j, T)`` to network inputs."""

    backlog: float = Field(default=100.0, gt=0.0)
    rate: float = Field(default=15.0, gt=0.0)
    patience: float = Field(default=5.0, gt=0.0)

    model_config = ConfigDict(frozen=True)


class PolicyState(BaseModel):
    """``s = (k_i, k_j, mu_i, mu_j, T)`` with ``T`` the remaining patience budget."""

    k_i: int = Field(ge=0)
    k_j: int = Field(ge=0)
    mu_i: float
    mu_j: float
    T: float

    model_config = ConfigDict(frozen=True)

    @field_validator("mu_i", "mu_j", "T")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("state entries must be finite")
        return value

    def features(self, scale: FeatureScale) -> list[float]:
        return [
            self.k_i / scale.backlog,
            self.k_j / scale.backlog,
            self.mu_i / scale.rate,
            self.mu_j / scale.rate,
            self.T / scale.patience,
        ]

    def swapped(self) -> PolicyState:
        """The same tenant's view from the other queue."""
        return PolicyState(k_i=self.k_j, k_j=self.k_i, mu_i=self.mu_j, mu_j=self.mu_i, T=self.T)


class TrainerConfig(BaseModel):
    learning_rate: float = Field(default=0.001, gt=0.0)
    optimizer: Literal["adam"] = "adam"
    beta1: float = Field(default=0.9, ge=0.0, lt=1.0)
    beta2: float = Field(default=0.999, ge=0.0, lt=1.0)
    adam_eps: float = Field(default=1e-8, gt=0.0)
    gamma: float = Field(default=0.99, gt=0.0, lt=1.0)
    episodes: int = Field(default=100, ge=1)
    epochs_per_episode: int = Field(default=100, ge=1)
    hidden_units: int = Field(default=128, ge=1)
    tau: float = Field(default=1.0, ge=0.0)
    delta: float = Field(default=1.0, ge=0.0)
    feature_scale: FeatureScale = Field(default_factory=FeatureScale)
    seed: int = Field(default=42, ge=0, lt=2**64)

    model_config = ConfigDict(frozen=True, extra="forbid")


class EnvStep(BaseModel):
    """Result of one environment step: the next observation and whether the tenant's episode ended."""

    state: PolicyState
    terminal: bool
    outcome: Literal["jockeyed", "reneged", "served", "expired"]


class EpisodeLoss(BaseModel):
    episode: int
    actor_loss: float
    critic_loss: float
