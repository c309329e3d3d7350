"""Dual-queue system configuration schemas."""
from __future__ import annotations

import math
import sys
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from impatience.core.rates import derive_service_rates

_ULP = sys.float_info.epsilon


class ConstantPatience(BaseModel):
    kind: Literal["constant"] = "constant"
    value: float = Field(default=5.0, gt=0.0)

    model_config = ConfigDict(frozen=True)


class ExponentialPatience(BaseModel):
    kind: Literal["exponential"] = "exponential"
    mean: float = Field(default=2.0, gt=0.0)

    model_config = ConfigDict(frozen=True)


PatienceModel = Annotated[Union[ConstantPatience, ExponentialPatience], Field(discriminator="kind")]


class SystemConfig(BaseModel):
    """Arrival, service and patience parameterization of the two queues.

    ``lambda_i``/``lambda_j`` default to an even split of ``lambda_total``; ``mu_i``/``mu_j``
    default to the values derived from ``delta_lambda``. Unstable configurations are allowed.
    """

    lambda_total: float = Field(default=7.0, ge=0.0)
    lambda_i: float | None = Field(default=None, ge=0.0)
    lambda_j: float | None = Field(default=None, ge=0.0)
    delta_lambda: float = 0.0
    mu_i: float | None = Field(default=None, gt=0.0)
    mu_j: float | None = Field(default=None, gt=0.0)
    patience_model: PatienceModel = Field(default_factory=ConstantPatience)
    t_local: float = Field(default=1.0, ge=0.0)
    lambda_tar: float = Field(default=0.0, ge=0.0)
    seed: int = Field(default=42, ge=0, lt=2**64)
    router: Literal["split", "join-shorter"] = "split"

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def _derive(self) -> SystemConfig:
        lambda_i, lambda_j = self.lambda_i, self.lambda_j
        if lambda_i is None and lambda_j is None:
            lambda_i = lambda_j = self.lambda_total / 2.0
        elif lambda_i is None:
            lambda_i = self.lambda_total - lambda_j
        elif lambda_j is None:
            lambda_j = self.lambda_total - lambda_i
        if lambda_i < 0.0 or lambda_j < 0.0:
            raise ValueError("per-queue arrival rates must be non-negative")
        if not math.isclose(lambda_i + lambda_j, self.lambda_total, rel_tol=2 * _ULP, abs_tol=1e-300):
            raise ValueError(
                f"lambda_i + lambda_j = {lambda_i + lambda_j} does not match lambda_total = {self.lambda_total}"
            )

        explicit_rates = self.mu_i is not None and self.mu_j is not None
        if self.lambda_total == 0.0:
            if not explicit_rates or self.delta_lambda != 0.0:
                raise ValueError("a zero arrival rate needs explicit mu_i, mu_j and delta_lambda = 0")
        elif not -self.lambda_total < self.delta_lambda < self.lambda_total:
            raise ValueError("delta_lambda must lie strictly inside (-lambda_total, lambda_total)")

        mu_i, mu_j = self.mu_i, self.mu_j
        if not explicit_rates:
            derived_i, derived_j = derive_service_rates(lambda_i, lambda_j, self.delta_lambda)
            mu_i = derived_i if mu_i is None else mu_i
            mu_j = derived_j if mu_j is None else mu_j

        if self.lambda_tar > lambda_j:
            raise ValueError(f"lambda_tar = {self.lambda_tar} exceeds lambda_j = {lambda_j}")

        object.__setattr__(self, "lambda_i", lambda_i)
        object.__setattr__(self, "lambda_j", lambda_j)
        object.__setattr__(self, "mu_i", mu_i)
        object.__setattr__(self, "mu_j", mu_j)
        return self

    def arrival_rate(self, queue: int) -> float:
        return self.lambda_i if queue == 0 else self.lambda_j

    def service_rate(self, queue: int) -> float:
        return self.mu_i if queue == 0 else self.mu_j

    def with_seed(self, seed: int) -> SystemConfig:
        return self.model_copy(update={"seed": seed})
