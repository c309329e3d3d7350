"""Run simulator replications across the arrival-rate set for one or more feeds."""
import argparse
import logging
from collections import defaultdict

import numpy as np

from impatience import __version__
from impatience.core.errors import EXIT_OK
from impatience.core.rates import sample_delta_lambda, utilization
from impatience.core.rng import Rng
from impatience.deps import RunContext, get_checkpoint, get_context, system_for
from impatience.schemas.metrics import SimMetrics
from impatience.simulation.engine import Replication, SimResult, run_many
from impatience.simulation.export import (
    BACKLOG_HEADER,
    METRICS_HEADER,
    SCHEMA_VERSION,
    backlog_rows,
    metrics_rows,
    write_csv,
    write_json,
    write_trace,
)
from impatience.simulation.feeds import make_feed

logger = logging.getLogger(__name__)

# per-lambda offsets are drawn from this stream so they do not shift with feed choice
DELTA_STREAM = 1 << 32
MIN_EXPOSURE = 1.0

COMPARISON_HEADER = [
    "lambda",
    "feed",
    "replications",
    "renege_rate_mean",
    "renege_rate_std",
    "jockey_rate_mean",
    "jockey_rate_std",
    "jockey_ratio_markov_learned",
]


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("simulate", help="simulate the dual-queue system")
    parser.add_argument("--feed", action="append", choices=("markov", "learned", "baseline", "debug-zero"))
    parser.add_argument("--checkpoint", help="trained actor-critic for the learned feed")
    parser.add_argument("--lambdas", type=float, nargs="+")
    parser.add_argument("--replications", type=int)
    parser.add_argument("--horizon", type=float)
    parser.add_argument("--warmup", type=float)
    parser.add_argument("--delta-lambda", type=float, help="fixed heterogeneity offset")
    parser.add_argument("--delta-fraction", type=float)
    parser.add_argument("--landing", choices=("tail", "thinned"))
    parser.add_argument("--traces", action="store_true", default=None, help="write per-run trace CSVs")
    parser.set_defaults(handler=run)


def _rates(metrics: SimMetrics) -> tuple[float, float]:
    renege = sum(queue.renege_rate for queue in metrics.queues)
    jockey = sum(queue.jockey_rate for queue in metrics.queues)
    return renege, jockey


def _spread(values: list[float]) -> tuple[float, float]:
    array = np.asarray(values, dtype=float)
    std = float(np.std(array, ddof=1)) if array.size > 1 else 0.0
    return float(np.mean(array)), std


def comparison_rows(results: dict[tuple[str, float], list[SimMetrics]], lambdas: list[float], feeds: list[str]) -> list[list]:
    """Mean and spread of renege and jockey rates per (lambda, feed)."""
    rows = []
    for lam in lambdas:
        jockey_means = {}
        block = []
        for feed in feeds:
            rates = [_rates(metrics) for metrics in results[(feed, lam)]]
            renege_mean, renege_std = _spread([rate[0] for rate in rates])
            jockey_mean, jockey_std = _spread([rate[1] for rate in rates])
            jockey_means[feed] = jockey_mean
            block.append([lam, feed, len(rates), renege_mean, renege_std, jockey_mean, jockey_std])
        ratio = ""
        if "markov" in jockey_means and jockey_means.get("learned", 0.0) > 0.0:
            ratio = jockey_means["markov"] / jockey_means["learned"]
        rows.extend(row + [ratio] for row in block)
    return rows


def curve_shape(metrics: list[SimMetrics]) -> dict[str, object]:
    """Pool backlog curves and report where jockeying peaks and how reneging ends."""
    exposure: dict[int, float] = defaultdict(float)
    reneges: dict[int, int] = defaultdict(int)
    jockeys: dict[int, int] = defaultdict(int)
    for item in metrics:
        for point in item.backlog_curve:
            exposure[point.queue_size] += point.exposure
            reneges[point.queue_size] += point.reneges
            jockeys[point.queue_size] += point.jockeys
    sizes = sorted(size for size, value in exposure.items() if value >= MIN_EXPOSURE)
    if not sizes:
        return {"queue_sizes": 0}
    jockey_rate = np.array([jockeys[size] / exposure[size] for size in sizes])
    renege_rate = np.array([reneges[size] / exposure[size] for size in sizes])
    peak = int(np.argmax(jockey_rate))
    running_max = float(np.max(renege_rate))
    return {
        "queue_sizes": len(sizes),
        "jockey_peak_queue_size": sizes[peak],
        "jockey_peak_below_midpoint": peak < len(sizes) / 2,
        "jockey_decay_from_peak": float(1.0 - jockey_rate[-1] / jockey_rate[peak]) if jockey_rate[peak] > 0 else 0.0,
        "renege_final_over_max": float(renege_rate[-1] / running_max) if running_max > 0 else 0.0,
    }


def simulate(context: RunContext, feeds: list[str], checkpoint_path: str | None) -> dict[tuple[str, float], list[SimResult]]:
    spec = context.spec
    sim = spec.simulation
    agent = calibration = None
    if "learned" in feeds:
        checkpoint = get_checkpoint(checkpoint_path)
        agent, calibration = checkpoint.agent, checkpoint.calibration

    jobs, keys = [], []
    for index, lam in enumerate(sim.lambdas):
        delta_rng = Rng(context.seed, DELTA_STREAM + index)
        for replication in range(sim.replications):
            delta = sample_delta_lambda(lam, sim.delta_fraction, delta_rng, sim.delta_lambda)
            config = system_for(spec.system, lam, delta)
            for queue in (0, 1):
                utilization(config.arrival_rate(queue), 1, config.service_rate(queue))
            stream = index * sim.replications + replication
            for feed in feeds:
                instance = make_feed(
                    feed,
                    markov=spec.markov,
                    lambda_tar=config.lambda_tar,
                    t_local=config.t_local,
                    agent=agent,
                    calibration=calibration,
                )
                jobs.append(
                    Replication(config, instance, sim.horizon, sim.warmup_time, stream, sim.sample_interval, sim.landing)
                )
                keys.append((feed, lam, replication))
    logger.info("Running %d replications with %d worker(s)", len(jobs), context.workers)
    results: dict[tuple[str, float], list[SimResult]] = defaultdict(list)
    for (feed, lam, _), result in zip(keys, run_many(jobs, context.workers)):
        results[(feed, lam)].append(result)
    return results


def run(args: argparse.Namespace) -> int:
    context = get_context(args)
    spec = context.spec.override(
        "simulation",
        lambdas=args.lambdas,
        replications=args.replications,
        horizon=args.horizon,
        warmup=args.warmup,
        delta_lambda=args.delta_lambda,
        delta_fraction=args.delta_fraction,
        landing=args.landing,
        traces=args.traces,
        feeds=list(dict.fromkeys(args.feed)) if args.feed else None,
    )
    context = RunContext(spec, context.output_dir, context.seed, context.workers)
    sim = spec.simulation
    feeds = list(dict.fromkeys(sim.feeds))
    results = simulate(context, feeds, args.checkpoint)

    out = context.output_dir
    metric_rows, curve_rows = [], []
    for lam in sim.lambdas:
        for feed in feeds:
            for replication, result in enumerate(results[(feed, lam)]):
                metric_rows.extend(metrics_rows(feed, lam, replication, result.metrics))
                curve_rows.extend(backlog_rows(feed, lam, replication, result.metrics))
                if sim.traces:
                    write_trace(out / "traces" / f"{feed}_lambda{lam:g}_rep{replication}.csv", result.trace.rows)
    write_csv(out / "metrics.csv", METRICS_HEADER, metric_rows)
    write_csv(out / "backlog_curve.csv", BACKLOG_HEADER, curve_rows)
    by_metrics = {key: [result.metrics for result in value] for key, value in results.items()}
    write_csv(out / "comparison.csv", COMPARISON_HEADER, comparison_rows(by_metrics, sim.lambdas, feeds))

    summary = {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "name": spec.name,
        "seed": context.seed,
        "simulation": sim.model_dump(mode="json"),
        "feeds": {},
    }
    for feed in feeds:
        runs = [metrics for lam in sim.lambdas for metrics in by_metrics[(feed, lam)]]
        summary["feeds"][feed] = {
            "runs": len(runs),
            "admitted": sum(item.admitted for item in runs),
            "completed": sum(item.completed for item in runs),
            "reneged": sum(item.reneged for item in runs),
            "jockey_events": sum(item.jockey_events for item in runs),
            "served_after_jockey": sum(item.served_after_jockey for item in runs),
            "curve_shape": curve_shape(runs),
        }
    write_json(out / "summary.json", summary)
    logger.info("Simulation finished: %d metric rows", len(metric_rows))
    return EXIT_OK
