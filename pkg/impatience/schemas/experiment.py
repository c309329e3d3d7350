"""Experiment documents: everything one CLI invocation needs, loadable from JSON."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from impatience.core.errors import ConfigurationError
from impatience.schemas.policy import TrainerConfig
from impatience.schemas.system import SystemConfig

FeedName = Literal["markov", "learned", "baseline", "debug-zero"]

DEFAULT_LAMBDAS = (3.0, 5.0, 7.0, 9.0, 11.0, 13.0, 15.0)


class MarkovFeedConfig(BaseModel):
    renege_threshold: float = Field(default=0.5, ge=0.0, le=1.0)
    jockey_threshold: float = Field(default=0.5, ge=0.0, le=1.0)
    target_servers: Literal[1, 2] = 1
    transit_time: float = Field(default=0.0, ge=0.0)
    eps: float = Field(default=1e-9, gt=0.0, lt=1.0)

    model_config = ConfigDict(frozen=True, extra="forbid")


class SimulationConfig(BaseModel):
    lambdas: list[float] = Field(default_factory=lambda: list(DEFAULT_LAMBDAS))
    replications: int = Field(default=5, ge=1)
    horizon: float = Field(default=200.0, gt=0.0)
    warmup: float | None = Field(default=None, ge=0.0)
    delta_fraction: float = Field(default=0.4, gt=0.0, lt=1.0)
    delta_lambda: float | None = None
    landing: Literal["tail", "thinned"] = "tail"
    sample_interval: float = Field(default=1.0, gt=0.0)
    feeds: list[FeedName] = Field(default_factory=lambda: ["markov"])
    traces: bool = False

    model_config = ConfigDict(frozen=True, extra="forbid")

    @field_validator("lambdas")
    @classmethod
    def _positive(cls, value: list[float]) -> list[float]:
        if not value or any(lam <= 0.0 for lam in value):
            raise ValueError("lambdas must be a non-empty list of positive rates")
        return value

    @model_validator(mode="after")
    def _window(self) -> SimulationConfig:
        if self.warmup is not None and self.warmup >= self.horizon:
            raise ValueError(f"warmup {self.warmup} must be below the horizon {self.horizon}")
        return self

    @property
    def warmup_time(self) -> float:
        return 0.1 * self.horizon if self.warmup is None else self.warmup


class SweepConfig(BaseModel):
    grid: list[int] = Field(default_factory=lambda: [2**p for p in range(9)])
    replications: int = Field(default=2000, ge=1)
    patience: float = Field(default=2.0, gt=0.0)
    m: int = Field(default=3, ge=0)
    m_mode: Literal["fixed", "stationary"] = "fixed"
    stationary_rho: float = Field(default=0.5, gt=0.0, lt=1.0)
    mode: Literal["decomposed", "simulated"] = "decomposed"
    mu_1: float = Field(default=1.0, gt=0.0)
    mu_2: float = Field(default=1.5, gt=0.0)
    confidence: float = Field(default=0.95, gt=0.0, lt=1.0)
    renege_target: float = Field(default=0.99, ge=0.0, le=1.0)
    jockey_target: float = Field(default=0.01, ge=0.0, le=1.0)
    error_reps: int = Field(default=2000, ge=1)
    error_tolerance: float = Field(default=0.1, gt=0.0)
    agreement_target: float = Field(default=0.9, ge=0.0, le=1.0)
    chernoff_mu: float = Field(default=1.0, gt=0.0)
    chernoff_n: list[int] = Field(default_factory=lambda: [10, 50, 200])
    chernoff_x: list[float] = Field(default_factory=lambda: [1.5, 2.0, 0.5])
    chernoff_reps: int = Field(default=100_000, ge=1)

    model_config = ConfigDict(frozen=True, extra="forbid")

    @field_validator("grid")
    @classmethod
    def _grid(cls, value: list[int]) -> list[int]:
        if len(value) < 2 or any(b <= a for a, b in zip(value, value[1:])) or value[0] < 0:
            raise ValueError("grid must hold at least two strictly increasing non-negative backlogs")
        return value

    @model_validator(mode="after")
    def _distinct_rates(self) -> SweepConfig:
        if self.mu_1 == self.mu_2:
            raise ValueError("the backlog sweep needs mu_1 != mu_2")
        return self


class ExperimentSpec(BaseModel):
    name: str = "default"
    system: SystemConfig = Field(default_factory=SystemConfig)
    trainer: TrainerConfig = Field(default_factory=TrainerConfig)
    markov: MarkovFeedConfig = Field(default_factory=MarkovFeedConfig)
    simulation: SimulationConfig = Field(default_factory=SimulationConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)

    model_config = ConfigDict(frozen=True, extra="forbid")

    @classmethod
    def load(cls, path: Path) -> ExperimentSpec:
        try:
            document = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError("cannot read experiment config", path=str(path), reason=str(exc)) from exc
        return cls.model_validate(document)

    def override(self, section: str, **values: object) -> ExperimentSpec:
        """Copy with ``values`` replacing fields of ``section``; ``None`` values are skipped."""
        updates = {key: value for key, value in values.items() if value is not None}
        if not updates:
            return self
        current = getattr(self, section)
        replaced = type(current).model_validate({**current.model_dump(), **updates})
        return self.model_copy(update={section: replaced})
