"""Event-driven simulator of two FCFS single-server queues with impatient tenants."""
import heapq
import logging
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Literal, NamedTuple

from impatience.core.errors import ConfigurationError
from impatience.core.patience import Patience, sample_patience
from impatience.core.rng import Rng
from impatience.schemas.feed import Decision, Observation, ObservationBatch
from impatience.schemas.metrics import SimMetrics, TraceRow
from impatience.schemas.system import SystemConfig
from impatience.simulation.events import Event, EventKind
from impatience.simulation.feeds import InformationFeed
from impatience.simulation.metrics import MetricsCollector, SimTrace

logger = logging.getLogger(__name__)

Landing = Literal["tail", "thinned"]


@dataclass
class Request:
    id: int
    entry: float
    queue: int
    patience: Patience
    jockeys: int = 0
    started: float | None = None
    left: float | None = None
    reneged: bool = False

    @property
    def deadline(self) -> float:
        return self.entry + self.patience.total_budget

    @property
    def waiting(self) -> bool:
        return self.started is None and not self.reneged

    def patience_at(self, now: float) -> Patience:
        """The same budget with the time since entry consumed; jockeys never reset it."""
        return self.patience.advance(now - self.entry)


class SimResult(NamedTuple):
    metrics: SimMetrics
    trace: SimTrace
    requests: dict[int, Request]


class TaggedOutcome(NamedTuple):
    """Fate of the tagged request of a pre-loaded run."""

    reneged: bool
    jockeyed: bool
    wait: float


class Simulator:
    """Heap-driven engine; one instance runs once.

    Arrivals stop at ``horizon`` and the system then drains. After every arrival, departure
    and expiry a single review runs at the same instant, letting each waiting request consult
    ``feed``.
    """

    def __init__(
        self,
        config: SystemConfig,
        feed: InformationFeed,
        rng: Rng,
        *,
        horizon: float,
        warmup: float = 0.0,
        sample_interval: float = 1.0,
        landing: Landing = "tail",
        initial_lengths: tuple[int, int] = (0, 0),
        tagged_patience: float | None = None,
    ) -> None:
        if not horizon > warmup >= 0.0:
            raise ConfigurationError("need horizon > warmup >= 0", horizon=horizon, warmup=warmup)
        if min(initial_lengths) < 0:
            raise ConfigurationError("initial queue lengths must be non-negative", initial_lengths=initial_lengths)
        self.config = config
        self.feed = feed
        self.rng = rng
        self.horizon = horizon
        self.warmup = warmup
        self.landing = landing
        self.initial_lengths = initial_lengths
        self.tagged_patience = tagged_patience
        self.tagged_id: int | None = None

        self.now = 0.0
        self._heap: list[Event] = []
        self._event_seq = 0
        self._row_seq = 0
        self._next_id = 0
        self._review_at: float | None = None
        self._last_review = 0.0
        self.waiting: tuple[deque[int], deque[int]] = (deque(), deque())
        self.in_service: list[int | None] = [None, None]
        self.requests: dict[int, Request] = {}
        self.rows: list[TraceRow] = []
        self.collector = MetricsCollector(warmup, config.t_local, sample_interval)

    # ---- state helpers ----

    def length(self, queue: int) -> int:
        return len(self.waiting[queue]) + (self.in_service[queue] is not None)

    def _schedule(self, time: float, kind: EventKind, queue: int = -1, request_id: int = -1) -> None:
        self._event_seq += 1
        heapq.heappush(self._heap, Event(time, kind, self._event_seq, queue, request_id))

    def _record(self, kind: str, queue: int, request_id: int) -> None:
        row = TraceRow(self._row_seq, self.now, kind, queue, request_id, self.length(0), self.length(1))
        self._row_seq += 1
        self.rows.append(row)
        self.collector.observe(row)

    def _request_review(self) -> None:
        if self._review_at != self.now:
            self._review_at = self.now
            self._schedule(self.now, EventKind.REVIEW)

    # ---- transitions ----

    def _admit(self, queue: int, patience: float | None = None) -> Request:
        budget = sample_patience(self.config.patience_model, self.rng) if patience is None else patience
        request = Request(self._next_id, self.now, queue, Patience(budget))
        self._next_id += 1
        self.requests[request.id] = request
        self.waiting[queue].append(request.id)
        self._record("arrival", queue, request.id)
        self._schedule(request.deadline, EventKind.EXPIRY, queue, request.id)
        self._start_if_idle(queue)
        return request

    def _start_if_idle(self, queue: int) -> None:
        if self.in_service[queue] is not None or not self.waiting[queue]:
            return
        request = self.requests[self.waiting[queue].popleft()]
        request.started = self.now
        request.queue = queue
        self.in_service[queue] = request.id
        self._record("start", queue, request.id)
        service = self.rng.exponential(self.config.service_rate(queue))
        self._schedule(self.now + service, EventKind.DEPARTURE, queue, request.id)

    def _next_arrival(self, queue: int) -> None:
        rate = self.config.lambda_total if self.config.router == "join-shorter" else self.config.arrival_rate(queue)
        arrival = self.now + self.rng.exponential(rate)
        if arrival < self.horizon:
            self._schedule(arrival, EventKind.ARRIVAL, queue)

    def _route(self, queue: int) -> int:
        if self.config.router == "split":
            return queue
        first, second = self.length(0), self.length(1)
        return 0 if first <= second else 1

    def _on_arrival(self, event: Event) -> None:
        self._admit(self._route(event.queue))
        self._next_arrival(event.queue)
        self._request_review()

    def _on_departure(self, event: Event) -> None:
        request = self.requests[event.request_id]
        request.left = self.now
        self.in_service[event.queue] = None
        self._record("departure", event.queue, request.id)
        self._start_if_idle(event.queue)
        self._request_review()

    def _on_expiry(self, event: Event) -> None:
        request = self.requests[event.request_id]
        if not request.waiting:
            return
        self.waiting[request.queue].remove(request.id)
        request.reneged = True
        request.left = self.now
        self._record("expiry", request.queue, request.id)
        self._request_review()

    def _renege(self, request: Request) -> None:
        self.waiting[request.queue].remove(request.id)
        request.reneged = True
        request.left = self.now
        self._record("renege", request.queue, request.id)

    def _jockey(self, request: Request) -> None:
        origin, target = request.queue, 1 - request.queue
        self.waiting[origin].remove(request.id)
        if self.landing == "thinned" and target == 1:
            ahead = self.rng.poisson(self.config.lambda_tar * (self.now - self._last_review))
            for _ in range(ahead):
                self._admit(target)
        request.queue = target
        request.jockeys += 1
        self.waiting[target].append(request.id)
        self._record("jockey", origin, request.id)
        self._start_if_idle(target)

    def _observe(self, request: Request, position: int) -> Observation:
        queue = request.queue
        patience = request.patience_at(self.now)
        return Observation(
            k_i=position + (self.in_service[queue] is not None),
            k_j=self.length(1 - queue),
            mu_i=self.config.service_rate(queue),
            mu_j=self.config.service_rate(1 - queue),
            remaining=patience.remaining,
            elapsed=patience.consumed,
            queue=queue,
        )

    def _on_review(self) -> None:
        snapshot = [
            self._observe(self.requests[request_id], position)
            for queue in (0, 1)
            for position, request_id in enumerate(self.waiting[queue])
        ]
        ids = [request_id for queue in (0, 1) for request_id in self.waiting[queue]]
        if snapshot:
            codes = self.feed.decide_batch(ObservationBatch.from_observations(snapshot))
            for request_id, code in zip(ids, codes.tolist()):
                if code == Decision.STAY:
                    continue
                request = self.requests[request_id]
                if not request.waiting:
                    continue
                position = self.waiting[request.queue].index(request_id)
                decision = self.feed.decide(self._observe(request, position)).decision
                if decision == Decision.RENEGE:
                    self._renege(request)
                elif decision == Decision.JOCKEY:
                    self._jockey(request)
        self._last_review = self.now

    # ---- driver ----

    def _seed(self) -> None:
        for queue in (0, 1):
            for _ in range(self.initial_lengths[queue]):
                self._admit(queue)
        if self.tagged_patience is not None:
            self.tagged_id = self._admit(0, self.tagged_patience).id
        for queue in (0,) if self.config.router == "join-shorter" else (0, 1):
            self._next_arrival(queue)
        if self.requests:
            self._request_review()

    def _step(self) -> None:
        event = heapq.heappop(self._heap)
        self.now = event.time
        if event.kind == EventKind.ARRIVAL:
            self._on_arrival(event)
        elif event.kind == EventKind.DEPARTURE:
            self._on_departure(event)
        elif event.kind == EventKind.EXPIRY:
            self._on_expiry(event)
        else:
            self._on_review()

    def run(self) -> SimResult:
        self._seed()
        while self._heap:
            self._step()
        metrics = self.collector.finish()
        trace = SimTrace(self.rows, self.warmup, self.config.t_local, self.collector.sample_interval)
        return SimResult(metrics, trace, self.requests)

    def run_tagged(self) -> TaggedOutcome:
        """Run until the tagged request starts service or reneges."""
        if self.tagged_patience is None:
            raise ConfigurationError("run_tagged needs a tagged request")
        self._seed()
        tagged = self.requests[self.tagged_id]
        while self._heap and tagged.waiting:
            self._step()
        end = tagged.started if tagged.started is not None else tagged.left
        return TaggedOutcome(reneged=tagged.reneged, jockeyed=tagged.jockeys > 0, wait=end - tagged.entry)


def run(
    config: SystemConfig,
    feed: InformationFeed,
    horizon: float,
    warmup: float | None = None,
    *,
    replication: int = 0,
    sample_interval: float = 1.0,
    landing: Landing = "tail",
    initial_lengths: tuple[int, int] = (0, 0),
) -> SimResult:
    """Simulate one replication; ``warmup`` defaults to a tenth of ``horizon``."""
    warmup = 0.1 * horizon if warmup is None else warmup
    simulator = Simulator(
        config,
        feed,
        Rng(config.seed, replication),
        horizon=horizon,
        warmup=warmup,
        sample_interval=sample_interval,
        landing=landing,
        initial_lengths=initial_lengths,
    )
    result = simulator.run()
    logger.debug(
        "Replication %d (%s): %d admitted, %d reneged, %d jockeys",
        replication,
        feed.provenance,
        result.metrics.admitted,
        result.metrics.reneged,
        result.metrics.jockey_events,
    )
    return result


class Replication(NamedTuple):
    config: SystemConfig
    feed: InformationFeed
    horizon: float
    warmup: float | None = None
    replication: int = 0
    sample_interval: float = 1.0
    landing: Landing = "tail"


def _run_job(job: Replication) -> SimResult:
    return run(
        job.config,
        job.feed,
        job.horizon,
        job.warmup,
        replication=job.replication,
        sample_interval=job.sample_interval,
        landing=job.landing,
    )


def run_many(jobs: list[Replication], workers: int = 1) -> list[SimResult]:
    """Run every replication, in a process pool when ``workers > 1``; results keep job order."""
    if workers <= 1 or len(jobs) <= 1:
        return [_run_job(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_job, jobs))
