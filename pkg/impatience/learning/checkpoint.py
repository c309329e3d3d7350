"""JSON checkpoints of the actor-critic: weights, config, calibration and episode counter."""
import json
import logging
from pathlib import Path
from typing import Any, NamedTuple

import torch

from impatience.core.errors import ConfigurationError
from impatience.learning.agent import ActorCritic
from impatience.learning.networks import DTYPE
from impatience.learning.training import WaitCalibration
from impatience.schemas.policy import TrainerConfig

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class Checkpoint(NamedTuple):
    agent: ActorCritic
    calibration: WaitCalibration | None
    episode: int


def _dump_network(network: torch.nn.Module) -> list[dict[str, Any]]:
    return [
        {"name": name, "shape": list(tensor.shape), "values": tensor.detach().flatten().tolist()}
        for name, tensor in network.state_dict().items()
    ]


def _load_network(network: torch.nn.Module, entries: list[dict[str, Any]]) -> None:
    state = {}
    for entry in entries:
        values = torch.tensor(entry["values"], dtype=DTYPE)
        state[entry["name"]] = values.reshape(entry["shape"])
    network.load_state_dict(state)


def save_checkpoint(
    path: Path,
    agent: ActorCritic,
    calibration: WaitCalibration | None,
    episode: int,
) -> Path:
    """Write the agent after ``episode`` completed episodes."""
    document = {
        "schema_version": SCHEMA_VERSION,
        "episode": episode,
        "config": agent.config.model_dump(mode="json"),
        "scales": agent.scale.model_dump(mode="json"),
        "calibration": None
        if calibration is None
        else {"slope": calibration.slope, "intercept": calibration.intercept},
        "networks": {"actor": _dump_network(agent.actor), "critic": _dump_network(agent.critic)},
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=1) + "\n", encoding="utf-8")
    logger.info("Wrote checkpoint %s", path)
    return path


def load_checkpoint(path: Path) -> Checkpoint:
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError("cannot read checkpoint", path=str(path), reason=str(exc)) from exc
    if document.get("schema_version") != SCHEMA_VERSION:
        raise ConfigurationError(
            "unsupported checkpoint schema", path=str(path), schema_version=document.get("schema_version")
        )
    agent = ActorCritic(TrainerConfig.model_validate(document["config"]))
    try:
        _load_network(agent.actor, document["networks"]["actor"])
        _load_network(agent.critic, document["networks"]["critic"])
    except (KeyError, RuntimeError) as exc:
        raise ConfigurationError("checkpoint does not match the network layout", path=str(path)) from exc
    raw = document.get("calibration")
    calibration = None if raw is None else WaitCalibration(raw["slope"], raw["intercept"])
    return Checkpoint(agent, calibration, int(document["episode"]))
