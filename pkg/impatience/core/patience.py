"""Total-time patience: budgets drawn at entry and consumed continuously."""
from dataclasses import dataclass

from impatience.core.errors import ConfigurationError
from impatience.core.rng import Rng
from impatience.schemas.system import ConstantPatience, ExponentialPatience, PatienceModel


@dataclass(frozen=True, slots=True)
class Patience:
    """Patience budget ``total_budget`` with ``consumed`` time elapsed since entry.

    The budget is never reset by a jockey: moving to another queue keeps the same record.
    """

    total_budget: float
    consumed: float = 0.0

    def __post_init__(self) -> None:
        if not self.total_budget > 0.0:
            raise ConfigurationError("patience budget must be positive", total_budget=self.total_budget)
        if self.consumed < 0.0:
            raise ConfigurationError("consumed patience must be non-negative", consumed=self.consumed)

    @property
    def remaining(self) -> float:
        return self.total_budget - self.consumed

    @property
    def exhausted(self) -> bool:
        return self.consumed >= self.total_budget

    def advance(self, dt: float) -> "Patience":
        if dt < 0.0:
            raise ValueError(f"time cannot run backwards (dt={dt})")
        return Patience(self.total_budget, self.consumed + dt)


def sample_patience(model: PatienceModel, rng: Rng) -> float:
    """Draw a patience budget ``T > 0`` from ``model``."""
    if isinstance(model, ConstantPatience):
        if not model.value > 0.0:
            raise ConfigurationError("constant patience must be positive", value=model.value)
        return model.value
    if isinstance(model, ExponentialPatience):
        if not model.mean > 0.0:
            raise ConfigurationError("patience mean must be positive", mean=model.mean)
        draw = float(rng.generator.exponential(model.mean))
        # a zero draw has probability zero but is representable; keep the budget positive
        return draw if draw > 0.0 else float.fromhex("0x1p-1074")
    raise ConfigurationError(f"unknown patience model {model!r}")
