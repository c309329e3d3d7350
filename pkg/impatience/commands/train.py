"""Train the actor-critic feed against the queue environment."""
import argparse
import logging
from pathlib import Path

from impatience.core.errors import EXIT_OK, AcceptanceError
from impatience.deps import get_context
from impatience.learning.checkpoint import load_checkpoint, save_checkpoint
from impatience.learning.training import loss_improved, train
from impatience.schemas.policy import EpisodeLoss
from impatience.simulation.environment import QueueEnvironment
from impatience.simulation.export import read_csv, write_csv

logger = logging.getLogger(__name__)

LOSS_HEADER = ["episode", "actor_loss", "critic_loss"]


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("train", help="train the actor-critic feed")
    parser.add_argument("--episodes", type=int)
    parser.add_argument("--epochs", type=int, help="steps per episode")
    parser.add_argument("--resume", help="checkpoint to continue from")
    parser.add_argument("--check", action="store_true", help="fail unless the loss decreased")
    parser.set_defaults(handler=run)


def _previous_losses(path: Path, before: int) -> list[EpisodeLoss]:
    if not path.exists():
        return []
    _, rows = read_csv(path)
    losses = [EpisodeLoss(episode=int(row[0]), actor_loss=float(row[1]), critic_loss=float(row[2])) for row in rows]
    return [loss for loss in losses if loss.episode < before]


def run(args: argparse.Namespace) -> int:
    context = get_context(args)
    spec = context.spec.override("trainer", episodes=args.episodes, epochs_per_episode=args.epochs)
    config = spec.trainer

    agent, start = None, 0
    if args.resume:
        checkpoint = load_checkpoint(Path(args.resume))
        agent, start = checkpoint.agent, checkpoint.episode
        logger.info("Resuming from %s at episode %d", args.resume, start)

    env = QueueEnvironment(
        config.seed,
        lambdas=tuple(spec.simulation.lambdas),
        delta_fraction=spec.simulation.delta_fraction,
        patience_model=spec.system.patience_model,
    )
    logger.info("Training %d episodes x %d epochs", config.episodes, config.epochs_per_episode)
    result = train(env, config, agent=agent, start_episode=start)

    out = context.output_dir
    losses_path = out / "losses.csv"
    losses = (_previous_losses(losses_path, start) if start else []) + result.losses
    write_csv(losses_path, LOSS_HEADER, [[loss.episode, loss.actor_loss, loss.critic_loss] for loss in losses])
    save_checkpoint(out / "checkpoint.json", result.agent, result.calibration, start + config.episodes)

    if args.check and not loss_improved(losses):
        raise AcceptanceError("mean loss of the last episodes is not below the first episodes")
    return EXIT_OK
