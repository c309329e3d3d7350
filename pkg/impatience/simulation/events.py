"""Event records for the simulation heap."""
from dataclasses import dataclass, field
from enum import IntEnum


class EventKind(IntEnum):
    """Kinds in tie-break priority order at equal times."""

    DEPARTURE = 0
    ARRIVAL = 1
    EXPIRY = 2
    REVIEW = 3


@dataclass(order=True, frozen=True, slots=True)
class Event:
    time: float
    kind: EventKind
    seq: int
    queue: int = field(default=-1, compare=False)
    request_id: int = field(default=-1, compare=False)
