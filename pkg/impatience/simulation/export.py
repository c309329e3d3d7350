"""CSV and JSON writers. Every CSV opens with a schema-version comment line."""
import csv
import json
import logging
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from impatience.schemas.metrics import SimMetrics, TraceRow

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SCHEMA_LINE = f"# schema_version={SCHEMA_VERSION}"

TRACE_HEADER = ["seq", "time", "kind", "queue", "request_id", "len_i", "len_j"]
METRICS_HEADER = [
    "feed",
    "lambda",
    "replication",
    "queue",
    "arrivals",
    "served",
    "reneged",
    "jockeys",
    "renege_rate",
    "jockey_rate",
    "renege_per_arrival",
    "jockey_per_arrival",
    "mean_queue_length",
    "successful_jockey_fraction",
    "mean_sojourn",
    "p50_sojourn",
    "p95_sojourn",
]
BACKLOG_HEADER = ["feed", "lambda", "replication", "queue", "queue_size", "exposure", "reneges", "jockeys", "renege_rate", "jockey_rate"]


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        handle.write(SCHEMA_LINE + "\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([_cell(value) for value in row] for row in rows)
    logger.info("Wrote %s", path)
    return path


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    """Header and rows of a CSV written by :func:`write_csv`."""
    with path.open(newline="", encoding="utf-8") as handle:
        lines = [line for line in handle if not line.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    return header, list(reader)


def write_json(path: Path, document: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info("Wrote %s", path)
    return path


def write_trace(path: Path, rows: Sequence[TraceRow]) -> Path:
    return write_csv(path, TRACE_HEADER, rows)


def metrics_rows(feed: str, lam: float, replication: int, metrics: SimMetrics) -> list[list[Any]]:
    """One row per queue of a run."""
    return [
        [
            feed,
            lam,
            replication,
            queue.queue,
            queue.arrivals,
            queue.served,
            queue.reneged,
            queue.jockeys,
            queue.renege_rate,
            queue.jockey_rate,
            queue.renege_per_arrival,
            queue.jockey_per_arrival,
            queue.mean_queue_length,
            metrics.successful_jockey_fraction,
            metrics.mean_sojourn,
            metrics.p50_sojourn,
            metrics.p95_sojourn,
        ]
        for queue in metrics.queues
    ]


def backlog_rows(feed: str, lam: float, replication: int, metrics: SimMetrics) -> list[list[Any]]:
    return [
        [
            feed,
            lam,
            replication,
            point.queue,
            point.queue_size,
            point.exposure,
            point.reneges,
            point.jockeys,
            point.renege_rate,
            point.jockey_rate,
        ]
        for point in metrics.backlog_curve
    ]


def format_table(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    """Left-aligned plain-text table."""
    cells = [list(header)] + [[_cell(value) for value in row] for row in rows]
    widths = [max(len(row[col]) for row in cells) for col in range(len(header))]
    lines = [" | ".join(value.ljust(width) for value, width in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "-+-".join("-" * width for width in widths))
    return "\n".join(lines)
