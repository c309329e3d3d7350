"""Simulation trace rows and the metrics computed from them."""
from typing import Literal, NamedTuple

from pydantic import BaseModel, ConfigDict, Field

Outcome = Literal["served", "reneged", "served-after-jockey"]
TraceKind = Literal["arrival", "start", "departure", "renege", "expiry", "jockey"]
TRACE_KINDS: tuple[str, ...] = ("arrival", "start", "departure", "renege", "expiry", "jockey")


class TraceRow(NamedTuple):
    """One state change. ``len_i``/``len_j`` are the queue lengths after it.

    For ``jockey`` rows ``queue`` is the origin queue.
    """

    seq: int
    time: float
    kind: str
    queue: int
    request_id: int
    len_i: int
    len_j: int


class QueueMetrics(BaseModel):
    queue: int
    arrivals: int = 0
    served: int = 0
    reneged: int = 0
    jockeys: int = 0
    renege_rate: float = 0.0
    jockey_rate: float = 0.0
    renege_per_arrival: float = 0.0
    jockey_per_arrival: float = 0.0
    mean_queue_length: float = 0.0

    model_config = ConfigDict(frozen=True)


class BacklogPoint(BaseModel):
    """Renege and jockey activity while a queue held ``queue_size`` requests."""

    queue: int
    queue_size: int
    exposure: float
    reneges: int
    jockeys: int
    renege_rate: float
    jockey_rate: float

    model_config = ConfigDict(frozen=True)


class TimeSample(BaseModel):
    time: float
    len_i: int
    len_j: int
    reneges: int
    jockeys: int

    model_config = ConfigDict(frozen=True)


class SimMetrics(BaseModel):
    """Metrics of one run over requests entering at or after the warmup.

    Backlog curve and queue-length averages cover the window from the warmup to the end of the
    drain; the time series covers the whole run.
    """

    warmup: float = 0.0
    end_time: float = 0.0
    measured_time: float = 0.0
    admitted: int = 0
    completed: int = 0
    reneged: int = 0
    jockey_events: int = 0
    served_after_jockey: int = 0
    successful_jockey_fraction: float = Field(default=0.0, ge=0.0, le=1.0)
    mean_sojourn: float = 0.0
    p50_sojourn: float = 0.0
    p95_sojourn: float = 0.0
    queues: list[QueueMetrics] = Field(default_factory=lambda: [QueueMetrics(queue=0), QueueMetrics(queue=1)])
    backlog_curve: list[BacklogPoint] = Field(default_factory=list)
    time_series: list[TimeSample] = Field(default_factory=list)

    model_config = ConfigDict(frozen=True)
