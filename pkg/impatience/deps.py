"""Shared command dependencies: resolved experiment, output location and trained agents."""
from __future__ import annotations

import argparse
import logging
from dataclasses import dataclass
from pathlib import Path

from impatience.core.config import settings
from impatience.core.errors import ConfigurationError
from impatience.learning.checkpoint import Checkpoint, load_checkpoint
from impatience.schemas.experiment import ExperimentSpec
from impatience.schemas.system import SystemConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunContext:
    spec: ExperimentSpec
    output_dir: Path
    seed: int
    workers: int


def resolve_seed(args: argparse.Namespace, spec: ExperimentSpec) -> int:
    """Flag first, then the config file, then the environment default."""
    if getattr(args, "seed", None) is not None:
        return args.seed
    if "seed" in spec.system.model_fields_set:
        return spec.system.seed
    return settings.seed


def get_context(args: argparse.Namespace) -> RunContext:
    spec = ExperimentSpec.load(args.config) if getattr(args, "config", None) else ExperimentSpec()
    seed = resolve_seed(args, spec)
    spec = spec.model_copy(
        update={
            "system": spec.system.with_seed(seed),
            "trainer": spec.trainer.model_copy(update={"seed": seed}),
        }
    )
    output_dir = Path(args.output_dir) if getattr(args, "output_dir", None) else settings.output_dir
    workers = args.workers if getattr(args, "workers", None) else settings.workers
    if workers < 1:
        raise ConfigurationError("workers must be at least 1", workers=workers)
    return RunContext(spec=spec, output_dir=output_dir, seed=seed, workers=workers)


def system_for(base: SystemConfig, lambda_total: float, delta_lambda: float) -> SystemConfig:
    """``base`` re-derived for another total arrival rate and heterogeneity offset."""
    fields = base.model_dump(exclude={"lambda_i", "lambda_j", "mu_i", "mu_j"})
    fields.update(lambda_total=lambda_total, delta_lambda=delta_lambda)
    return SystemConfig.model_validate(fields)


def get_checkpoint(path: str | Path | None) -> Checkpoint:
    if path is None:
        raise ConfigurationError("the learned feed needs --checkpoint")
    checkpoint = load_checkpoint(Path(path))
    if checkpoint.calibration is None:
        raise ConfigurationError("checkpoint carries no wait calibration", path=str(path))
    logger.info("Loaded checkpoint %s (episode %d)", path, checkpoint.episode)
    return checkpoint
