"""Actor and critic networks: two hidden layers with rectified-linear activations."""
import torch
from torch import nn

STATE_FEATURES = 5
ACTIONS = 2
DTYPE = torch.float64


def _mlp(inputs: int, hidden: int, outputs: int) -> nn.Sequential:
    body = nn.Sequential(
        nn.Linear(inputs, hidden),
        nn.ReLU(),
        nn.Linear(hidden, hidden),
        nn.ReLU(),
        nn.Linear(hidden, outputs),
    )
    for layer in body:
        if isinstance(layer, nn.Linear):
            # uniform in +-sqrt(6 / (fan_in + fan_out))
            nn.init.xavier_uniform_(layer.weight)
            nn.init.zeros_(layer.bias)
    return body.to(DTYPE)


class ActorNetwork(nn.Module):
    """Softmax policy over ``{0: renege, 1: jockey}``."""

    def __init__(self, hidden: int = 128, inputs: int = STATE_FEATURES) -> None:
        super().__init__()
        self.body = _mlp(inputs, hidden, ACTIONS)

    def forward(self, features: torch.Tensor) -> torch.Tensor:
        return torch.softmax(self.body(features), dim=-1)

    def log_probs(self, features: torch.Tensor) -> torch.Tensor:
        return torch.log_softmax(self.body(features), dim=-1)


class CriticNetwork(nn.Module):
    """Scalar state-value estimate."""

    def __init__(self, hidden: int = 128, inputs: int = STATE_FEATURES) -> None:
        super().__init__()
        self.body = _mlp(inputs, hidden, 1)

    def forward(self, features: torch.Tensor) -> torch.Tensor:
        return self.body(features).squeeze(-1)
