"""Run the four asymptotic checks and write their CSVs and a pass/fail report."""
import argparse
import logging

from impatience.asymptotics.chernoff import chernoff_check
from impatience.asymptotics.robustness import decision_agreement, sublinear_error_profile
from impatience.asymptotics.sweep import sweep_backlog
from impatience.core.errors import EXIT_OK, AcceptanceError
from impatience.core.rng import Rng
from impatience.deps import RunContext, get_checkpoint, get_context
from impatience.schemas.asymptotics import AsymptoticsReport, Check
from impatience.simulation.export import write_csv, write_json
from impatience.simulation.feeds import InformationFeed, MarkovFeed, make_feed

logger = logging.getLogger(__name__)

SUBLINEAR_STREAM = 1 << 30
AGREEMENT_STREAM = SUBLINEAR_STREAM + 1
CHERNOFF_STREAM = SUBLINEAR_STREAM + 2


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("asymptotics", help="verify the large-backlog limits")
    parser.add_argument("--feed", choices=("markov", "learned", "baseline", "debug-zero"), default="markov")
    parser.add_argument("--checkpoint", help="trained actor-critic for the learned feed")
    parser.add_argument("--grid", type=int, nargs="+")
    parser.add_argument("--replications", type=int)
    parser.add_argument("--patience", type=float)
    parser.add_argument("--mode", choices=("decomposed", "simulated"))
    parser.set_defaults(handler=run)


def _feed(name: str, context: RunContext, checkpoint: str | None) -> InformationFeed:
    spec = context.spec
    if name == "learned":
        loaded = get_checkpoint(checkpoint)
        return make_feed(name, agent=loaded.agent, calibration=loaded.calibration)
    return make_feed(name, markov=spec.markov, lambda_tar=spec.system.lambda_tar, t_local=spec.system.t_local)


def evaluate(feed: InformationFeed, context: RunContext) -> tuple[AsymptoticsReport, dict[str, tuple[list[str], list[list]]]]:
    """Run every check; returns the report and the CSV tables keyed by file name."""
    sweep_cfg = context.spec.sweep
    seed = context.seed
    reference = MarkovFeed(context.spec.markov, lambda_tar=context.spec.system.lambda_tar, t_local=context.spec.system.t_local)
    common = dict(m=sweep_cfg.m, patience=sweep_cfg.patience)

    sweep = sweep_backlog(feed, sweep_cfg, seed)
    profile = sublinear_error_profile(
        feed,
        sweep_cfg.grid,
        sweep_cfg.error_reps,
        Rng(seed, SUBLINEAR_STREAM),
        mu=sweep_cfg.mu_1,
        mu_other=sweep_cfg.mu_2,
        tolerance=sweep_cfg.error_tolerance,
        **common,
    )
    agreement = decision_agreement(
        feed,
        reference,
        sweep_cfg.grid,
        sweep_cfg.error_reps,
        Rng(seed, AGREEMENT_STREAM),
        mu_1=sweep_cfg.mu_1,
        mu_2=sweep_cfg.mu_2,
        **common,
    )
    chernoff = chernoff_check(
        sweep_cfg.chernoff_mu,
        sweep_cfg.chernoff_n,
        sweep_cfg.chernoff_x,
        sweep_cfg.chernoff_reps,
        Rng(seed, CHERNOFF_STREAM),
    )

    last = sweep.points[-1]
    final_agreement = agreement.points[-1].feed_agreement
    checks = [
        Check(
            name="backlog_sweep",
            passed=sweep.passed,
            detail=(
                f"renege {last.renege_probability:.4f} at n={last.n} (target {sweep_cfg.renege_target}), "
                f"successful jockey {last.jockey_success_probability:.4f} (target {sweep_cfg.jockey_target}), "
                f"monotone={sweep.monotone}"
            ),
        ),
        Check(
            name="sublinear_error",
            passed=profile.passed,
            detail=f"slope {profile.slope:.4g}, final scaled median {profile.final_median_scaled:.4g}",
        ),
        Check(
            name="decision_agreement",
            passed=final_agreement >= sweep_cfg.agreement_target,
            detail=f"{agreement.first} vs {agreement.second} agreement {final_agreement:.3f} at n={agreement.points[-1].n}",
        ),
        Check(
            name="chernoff",
            passed=chernoff.passed,
            detail=f"I(1)={chernoff.rate_at_one}, convex={chernoff.convex}, {sum(r.passed for r in chernoff.rows)}/{len(chernoff.rows)} tails within bound",
        ),
    ]
    tables = {
        "sweep.csv": (
            ["n", "replications", "jockey_fraction", "renege_probability", "renege_low", "renege_high",
             "jockey_success_probability", "jockey_success_low", "jockey_success_high", "renege_trend",
             "jockey_success_trend"],
            [[p.n, p.replications, p.jockey_fraction, p.renege_probability, p.renege_low, p.renege_high,
              p.jockey_success_probability, p.jockey_success_low, p.jockey_success_high, p.renege_trend,
              p.jockey_success_trend] for p in sweep.points],
        ),
        "sublinear.csv": (
            ["feed", "n", "estimate", "median_ratio", "mean_ratio", "p90_ratio"],
            [[profile.provenance, p.n, p.estimate, p.median_ratio, p.mean_ratio, p.p90_ratio] for p in profile.points],
        ),
        "agreement.csv": (
            ["n", "feed_agreement", "first_vs_truth", "second_vs_truth", "truth_switch_fraction", "mean_sign"],
            [[p.n, p.feed_agreement, p.first_vs_truth, p.second_vs_truth, p.truth_switch_fraction, p.mean_sign]
             for p in agreement.points],
        ),
        "chernoff.csv": (
            ["n", "x", "tail", "rate", "bound", "exact", "empirical", "standard_error", "passed"],
            [[r.n, r.x, r.tail, r.rate, r.bound, r.exact, r.empirical, r.standard_error, r.passed] for r in chernoff.rows],
        ),
    }
    return AsymptoticsReport(checks=checks), tables


def run(args: argparse.Namespace) -> int:
    context = get_context(args)
    spec = context.spec.override(
        "sweep", grid=args.grid, replications=args.replications, patience=args.patience, mode=args.mode
    )
    context = RunContext(spec, context.output_dir, context.seed, context.workers)
    feed = _feed(args.feed, context, args.checkpoint)
    report, tables = evaluate(feed, context)
    for name, (header, rows) in tables.items():
        write_csv(context.output_dir / name, header, rows)
    write_json(context.output_dir / "report.json", report.model_dump(mode="json"))
    for check in report.checks:
        log = logger.info if check.passed else logger.warning
        log("%s: %s (%s)", check.name, "pass" if check.passed else "FAIL", check.detail)
    if not report.passed:
        failed = [check.name for check in report.checks if not check.passed]
        raise AcceptanceError("asymptotic checks failed", checks=failed)
    return EXIT_OK
