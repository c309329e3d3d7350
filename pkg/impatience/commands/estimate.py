"""One-shot evaluation of the closed-form quantities for a single state."""
import argparse
import logging

from impatience.core.errors import EXIT_OK, ConfigurationError
from impatience.markov.erlang import miss_deadline_probability, renege_fail_probability, renege_probability
from impatience.markov.jockey import (
    expected_jockey_time,
    jockey_wait_closed_form,
    landing_pmf,
    switch_outcome_probabilities,
)
from impatience.markov.pure_death import expected_pure_death_jockey_time
from impatience.markov.uniformization import build_uniformized_chain
from impatience.simulation.export import SCHEMA_LINE, format_table

logger = logging.getLogger(__name__)

PMF_HEAD = 5


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("estimate", help="print closed-form waits and switch probabilities")
    parser.add_argument("--k", type=int, required=True, help="requests ahead")
    parser.add_argument("--mu", type=float, required=True, help="service rate")
    parser.add_argument("--patience", type=float, default=5.0, help="patience budget T")
    parser.add_argument("--elapsed", type=float, default=0.0, help="time already waited t0")
    parser.add_argument("--lambda-tar", type=float, default=0.0, help="arrival rate joining ahead of a jockey")
    parser.add_argument("--time", type=float, default=0.0, help="transit time for the landing distribution")
    parser.add_argument("--format", choices=("table", "csv", "both"), default="both")
    parser.set_defaults(handler=run)


def quantities(k: int, mu: float, patience: float, elapsed: float, lambda_tar: float, time: float) -> list[tuple[str, float]]:
    if k < 0:
        raise ConfigurationError("k must be non-negative", k=k)
    if mu <= 0.0:
        raise ConfigurationError("mu must be positive", mu=mu)
    if elapsed < 0.0 or patience <= 0.0 or time < 0.0:
        raise ConfigurationError("need patience > 0, elapsed >= 0 and time >= 0", patience=patience, elapsed=elapsed, time=time)
    # raises UnboundedGrowthError for lambda_tar >= 2 mu
    jockey_wait = jockey_wait_closed_form(k, mu, lambda_tar)
    chain = build_uniformized_chain(lambda_tar, mu, min_states=k + 1)
    pmf = landing_pmf(k, chain, time)
    switch = switch_outcome_probabilities(pmf, mu, lambda_tar, patience, elapsed)
    rows = [
        ("mean_wait", k / mu),
        ("renege_probability", renege_probability(k, mu, patience)),
        ("renege_fail_probability", renege_fail_probability(k, mu, patience, elapsed)),
        ("miss_deadline_probability", miss_deadline_probability(k, mu, patience, elapsed)),
        ("jockey_wait", jockey_wait),
        ("expected_jockey_time", expected_jockey_time(pmf, mu, lambda_tar)),
    ]
    if lambda_tar == 0.0:
        rows.append(("expected_pure_death_jockey_time", expected_pure_death_jockey_time(k, mu, time)))
    rows.extend((f"pmf_{n}", float(pmf[n])) for n in range(min(PMF_HEAD, pmf.mass.size)))
    rows.append(("pmf_truncation_error", pmf.truncation_error))
    rows.append(("switch_fail", switch.fail))
    rows.append(("switch_success", switch.success))
    return [(name, float(value)) for name, value in rows]


def run(args: argparse.Namespace) -> int:
    rows = quantities(args.k, args.mu, args.patience, args.elapsed, args.lambda_tar, args.time)
    if args.format in ("table", "both"):
        print(format_table(["quantity", "value"], rows))
    if args.format == "both":
        print()
    if args.format in ("csv", "both"):
        print(SCHEMA_LINE)
        print("quantity,value")
        for name, value in rows:
            print(f"{name},{value!r}")
    return EXIT_OK
