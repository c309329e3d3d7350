"""Information feed observations, decisions and wait estimates."""
from dataclasses import dataclass
from enum import IntEnum
from typing import Literal, NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict

Provenance = Literal["markov", "learned", "baseline", "debug-zero"]


class Decision(IntEnum):
    STAY = 0
    RENEGE = 1
    JOCKEY = 2


class WaitEstimate(BaseModel):
    value: float
    provenance: Provenance

    model_config = ConfigDict(frozen=True)


class Observation(NamedTuple):
    """What a waiting tenant sees at a review.

    ``k_i`` requests are ahead of it in its own queue ``queue``, ``k_j`` requests are in the other
    queue; ``remaining`` is the unused patience and ``elapsed`` the time since entry.
    """

    k_i: int
    k_j: int
    mu_i: float
    mu_j: float
    remaining: float
    elapsed: float
    queue: int = 0

    @property
    def patience(self) -> float:
        return self.remaining + self.elapsed


class FeedDecision(NamedTuple):
    decision: Decision
    estimate: WaitEstimate


@dataclass(frozen=True)
class ObservationBatch:
    """Column-wise observations for every waiting request at one review."""

    k_i: np.ndarray
    k_j: np.ndarray
    mu_i: np.ndarray
    mu_j: np.ndarray
    remaining: np.ndarray
    elapsed: np.ndarray
    queue: np.ndarray

    def __len__(self) -> int:
        return int(self.k_i.size)

    @classmethod
    def from_observations(cls, observations: list[Observation]) -> "ObservationBatch":
        columns = list(zip(*observations)) if observations else [()] * 7
        return cls(
            k_i=np.asarray(columns[0], dtype=np.int64),
            k_j=np.asarray(columns[1], dtype=np.int64),
            mu_i=np.asarray(columns[2], dtype=float),
            mu_j=np.asarray(columns[3], dtype=float),
            remaining=np.asarray(columns[4], dtype=float),
            elapsed=np.asarray(columns[5], dtype=float),
            queue=np.asarray(columns[6], dtype=np.int64),
        )

    def row(self, index: int) -> Observation:
        return Observation(
            int(self.k_i[index]),
            int(self.k_j[index]),
            float(self.mu_i[index]),
            float(self.mu_j[index]),
            float(self.remaining[index]),
            float(self.elapsed[index]),
            int(self.queue[index]),
        )
