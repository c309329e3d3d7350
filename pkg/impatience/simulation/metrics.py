"""Run metrics, collected online and recomputed from a finished trace.

Both paths reduce to the same request ledger and window sums, and every float sum goes
through :func:`math.fsum`, so the two agree exactly whatever order events were tallied in.
"""
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np

from impatience.core.errors import TraceError
from impatience.schemas.metrics import TRACE_KINDS, BacklogPoint, QueueMetrics, SimMetrics, TimeSample, TraceRow

RENEGE_KINDS = ("renege", "expiry")


@dataclass
class SimTrace:
    rows: list[TraceRow]
    warmup: float = 0.0
    t_local: float = 1.0
    sample_interval: float = 1.0


@dataclass
class LedgerEntry:
    entry: float
    entry_queue: int
    jockey_origins: list[int] = field(default_factory=list)
    outcome: str | None = None
    outcome_queue: int = -1
    finish: float | None = None


@dataclass
class WindowSums:
    queue_area: tuple[list[float], list[float]] = field(default_factory=lambda: ([], []))
    level_exposure: dict[tuple[int, int], list[float]] = field(default_factory=lambda: defaultdict(list))
    level_reneges: Counter = field(default_factory=Counter)
    level_jockeys: Counter = field(default_factory=Counter)
    samples: list[TimeSample] = field(default_factory=list)


def _apply_to_ledger(ledger: dict[int, LedgerEntry], row: TraceRow, t_local: float) -> None:
    """Update the request ledger with ``row``; raises :class:`TraceError` on inconsistencies."""
    if row.kind == "arrival":
        if row.request_id in ledger:
            raise TraceError("request arrives twice", request_id=row.request_id, seq=row.seq)
        ledger[row.request_id] = LedgerEntry(entry=row.time, entry_queue=row.queue)
        return
    entry = ledger.get(row.request_id)
    if entry is None:
        raise TraceError(f"{row.kind} for unknown request", request_id=row.request_id, seq=row.seq)
    if row.kind == "jockey":
        if entry.outcome is not None:
            raise TraceError("jockey after the request left the queue", request_id=row.request_id, seq=row.seq)
        entry.jockey_origins.append(row.queue)
    elif row.kind == "start":
        if entry.outcome is not None:
            raise TraceError("service starts twice", request_id=row.request_id, seq=row.seq)
        entry.outcome = "served-after-jockey" if entry.jockey_origins else "served"
        entry.outcome_queue = row.queue
    elif row.kind == "departure":
        if entry.outcome not in ("served", "served-after-jockey") or entry.finish is not None:
            raise TraceError("departure without service start", request_id=row.request_id, seq=row.seq)
        entry.finish = row.time
    elif row.kind in RENEGE_KINDS:
        if entry.outcome is not None:
            raise TraceError("request reneges after leaving", request_id=row.request_id, seq=row.seq)
        entry.outcome = "reneged"
        entry.outcome_queue = row.queue
        entry.finish = row.time + t_local
    else:
        raise TraceError(f"unknown trace kind {row.kind!r}", seq=row.seq)


def _rate(count: float, exposure: float) -> float:
    return count / exposure if exposure > 0.0 else 0.0


def assemble_metrics(
    ledger: dict[int, LedgerEntry],
    sums: WindowSums,
    *,
    warmup: float,
    end_time: float,
) -> SimMetrics:
    for request_id, entry in ledger.items():
        if entry.finish is None:
            raise TraceError("request never left the system", request_id=request_id)
    measured = [entry for entry in ledger.values() if entry.entry >= warmup]
    measured_time = max(end_time - warmup, 0.0)

    sojourns = np.array([entry.finish - entry.entry for entry in measured], dtype=float)
    completed = sum(1 for entry in measured if entry.outcome != "reneged")
    reneged = len(measured) - completed
    jockey_events = sum(len(entry.jockey_origins) for entry in measured)
    after_jockey = sum(1 for entry in measured if entry.outcome == "served-after-jockey")

    queues = []
    for queue in (0, 1):
        arrivals = sum(1 for entry in measured if entry.entry_queue == queue)
        served = sum(1 for entry in measured if entry.outcome != "reneged" and entry.outcome_queue == queue)
        reneges = sum(1 for entry in measured if entry.outcome == "reneged" and entry.outcome_queue == queue)
        jockeys = sum(entry.jockey_origins.count(queue) for entry in measured)
        queues.append(
            QueueMetrics(
                queue=queue,
                arrivals=arrivals,
                served=served,
                reneged=reneges,
                jockeys=jockeys,
                renege_rate=_rate(reneges, measured_time),
                jockey_rate=_rate(jockeys, measured_time),
                renege_per_arrival=_rate(reneges, arrivals),
                jockey_per_arrival=_rate(jockeys, arrivals),
                mean_queue_length=_rate(math.fsum(sums.queue_area[queue]), measured_time),
            )
        )

    levels = sorted(set(sums.level_exposure) | set(sums.level_reneges) | set(sums.level_jockeys))
    curve = []
    for queue, size in levels:
        exposure = math.fsum(sums.level_exposure.get((queue, size), ()))
        reneges = sums.level_reneges[(queue, size)]
        jockeys = sums.level_jockeys[(queue, size)]
        curve.append(
            BacklogPoint(
                queue=queue,
                queue_size=size,
                exposure=exposure,
                reneges=reneges,
                jockeys=jockeys,
                renege_rate=_rate(reneges, exposure),
                jockey_rate=_rate(jockeys, exposure),
            )
        )

    if sojourns.size:
        p50, p95 = np.percentile(sojourns, [50.0, 95.0])
        mean_sojourn = math.fsum(sojourns) / sojourns.size
    else:
        p50 = p95 = mean_sojourn = 0.0
    return SimMetrics(
        warmup=warmup,
        end_time=end_time,
        measured_time=measured_time,
        admitted=len(measured),
        completed=completed,
        reneged=reneged,
        jockey_events=jockey_events,
        served_after_jockey=after_jockey,
        successful_jockey_fraction=_rate(after_jockey, jockey_events),
        mean_sojourn=float(mean_sojourn),
        p50_sojourn=float(p50),
        p95_sojourn=float(p95),
        queues=queues,
        backlog_curve=curve,
        time_series=list(sums.samples),
    )


class MetricsCollector:
    """Tallies rows as the engine emits them."""

    def __init__(self, warmup: float, t_local: float, sample_interval: float) -> None:
        self.warmup = warmup
        self.t_local = t_local
        self.sample_interval = sample_interval
        self.ledger: dict[int, LedgerEntry] = {}
        self.sums = WindowSums()
        self._lengths = (0, 0)
        self._last_time = 0.0
        self._next_sample = 0
        self._reneges = 0
        self._jockeys = 0
        self._seen = False

    def _emit_samples(self, before: float, inclusive: bool) -> None:
        while True:
            point = self._next_sample * self.sample_interval
            if point > before or (point == before and not inclusive):
                return
            self.sums.samples.append(
                TimeSample(
                    time=point,
                    len_i=self._lengths[0],
                    len_j=self._lengths[1],
                    reneges=self._reneges,
                    jockeys=self._jockeys,
                )
            )
            self._next_sample += 1

    def observe(self, row: TraceRow) -> None:
        self._seen = True
        self._emit_samples(row.time, inclusive=False)
        start = max(self._last_time, self.warmup)
        if row.time > start:
            dt = row.time - start
            for queue in (0, 1):
                self.sums.queue_area[queue].append(self._lengths[queue] * dt)
                self.sums.level_exposure[(queue, self._lengths[queue])].append(dt)
        if row.time >= self.warmup:
            if row.kind in RENEGE_KINDS:
                self.sums.level_reneges[(row.queue, self._lengths[row.queue])] += 1
            elif row.kind == "jockey":
                self.sums.level_jockeys[(row.queue, self._lengths[row.queue])] += 1
        if row.kind in RENEGE_KINDS:
            self._reneges += 1
        elif row.kind == "jockey":
            self._jockeys += 1
        _apply_to_ledger(self.ledger, row, self.t_local)
        self._lengths = (row.len_i, row.len_j)
        self._last_time = row.time

    def finish(self) -> SimMetrics:
        if self._seen:
            self._emit_samples(self._last_time, inclusive=True)
        return assemble_metrics(self.ledger, self.sums, warmup=self.warmup, end_time=self._last_time)


def drain_statistics(trace: SimTrace) -> SimMetrics:
    """Recompute :class:`SimMetrics` from the raw rows of a completed run."""
    rows = trace.rows
    sums = WindowSums()
    ledger: dict[int, LedgerEntry] = {}
    if not rows:
        return assemble_metrics(ledger, sums, warmup=trace.warmup, end_time=0.0)

    times = np.array([row.time for row in rows], dtype=float)
    seqs = np.array([row.seq for row in rows], dtype=np.int64)
    if np.any(np.diff(times) < 0.0) or np.any(np.diff(seqs) <= 0) or times[0] < 0.0:
        raise TraceError("trace rows are not in time and sequence order")
    for row in rows:
        if row.kind not in TRACE_KINDS or row.queue not in (0, 1) or min(row.len_i, row.len_j) < 0:
            raise TraceError("malformed trace row", seq=row.seq, kind=row.kind, queue=row.queue)
        _apply_to_ledger(ledger, row, trace.t_local)

    lengths = np.array([(row.len_i, row.len_j) for row in rows], dtype=np.int64)
    before = np.vstack([np.zeros((1, 2), dtype=np.int64), lengths[:-1]])
    starts = np.maximum(np.concatenate([[0.0], times[:-1]]), trace.warmup)
    positive = times > starts
    dts = np.where(positive, times - starts, 0.0)
    for queue in (0, 1):
        levels = before[positive, queue]
        widths = dts[positive]
        sums.queue_area[queue].extend((levels * widths).tolist())
        for level, width in zip(levels.tolist(), widths.tolist()):
            sums.level_exposure[(queue, level)].append(width)

    kinds = np.array([row.kind for row in rows])
    queues = np.array([row.queue for row in rows], dtype=np.int64)
    renege_rows = np.isin(kinds, RENEGE_KINDS)
    jockey_rows = kinds == "jockey"
    in_window = times >= trace.warmup
    pre_level = before[np.arange(len(rows)), queues]
    for mask, counter in ((renege_rows, sums.level_reneges), (jockey_rows, sums.level_jockeys)):
        selected = mask & in_window
        counter.update(zip(queues[selected].tolist(), pre_level[selected].tolist()))

    cum_reneges = np.cumsum(renege_rows)
    cum_jockeys = np.cumsum(jockey_rows)
    end_time = float(times[-1])
    k = 0
    while k * trace.sample_interval <= end_time:
        point = k * trace.sample_interval
        index = int(np.searchsorted(times, point, side="right")) - 1
        if index < 0:
            sample = TimeSample(time=point, len_i=0, len_j=0, reneges=0, jockeys=0)
        else:
            sample = TimeSample(
                time=point,
                len_i=int(lengths[index, 0]),
                len_j=int(lengths[index, 1]),
                reneges=int(cum_reneges[index]),
                jockeys=int(cum_jockeys[index]),
            )
        sums.samples.append(sample)
        k += 1
    return assemble_metrics(ledger, sums, warmup=trace.warmup, end_time=end_time)
