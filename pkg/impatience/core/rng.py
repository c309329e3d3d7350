"""Seeded random streams, one per replication."""
import numpy as np

MAX_SEED = 2**64


class Rng:
    """Reproducible numpy generator addressed by ``(seed, stream)``.

    Identical ``(seed, stream)`` pairs yield bit-identical draw sequences. Streams of one seed
    are statistically independent, so replications can run in parallel without sharing state.
    """

    def __init__(self, seed: int, stream: int = 0) -> None:
        if not 0 <= seed < MAX_SEED:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        if stream < 0:
            raise ValueError(f"stream must be non-negative, got {stream}")
        self.seed = seed
        self.stream = stream
        sequence = np.random.SeedSequence(seed, spawn_key=(stream,))
        self.generator = np.random.Generator(np.random.PCG64(sequence))

    def spawn(self, stream: int) -> "Rng":
        """Return the sibling stream ``stream`` of the same seed."""
        return Rng(self.seed, stream)

    def exponential(self, rate: float) -> float:
        """Exponential holding time; ``inf`` for a zero rate."""
        if rate <= 0.0:
            return float("inf")
        return float(self.generator.exponential(1.0 / rate))

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        return float(self.generator.uniform(low, high))

    def random(self) -> float:
        return float(self.generator.random())

    def poisson(self, mean: float) -> int:
        if mean <= 0.0:
            return 0
        return int(self.generator.poisson(mean))

    def choice(self, options: int) -> int:
        return int(self.generator.integers(options))

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, stream={self.stream})"
