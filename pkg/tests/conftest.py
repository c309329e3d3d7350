"""Pytest configuration and shared fixtures."""
import os
import sys
import tempfile
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

os.environ.setdefault("IMPATIENCE_LOG_LEVEL", "WARNING")
os.environ.setdefault("IMPATIENCE_OUTPUT_DIR", str(Path(tempfile.gettempdir()) / "impatience-tests"))
os.environ.setdefault("IMPATIENCE_WORKERS", "1")

from impatience.core.rng import Rng  # noqa: E402
from impatience.schemas.system import SystemConfig  # noqa: E402


@pytest.fixture()
def rng() -> Rng:
    return Rng(20240601)


@pytest.fixture()
def system() -> SystemConfig:
    return SystemConfig()
