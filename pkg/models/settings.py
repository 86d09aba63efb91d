"""
Central numeric tolerances, read from the environment
"""

import logging
import os
from dataclasses import dataclass, fields

from dotenv import load_dotenv

from .errors import ConfigurationError

logger = logging.getLogger(__name__)

load_dotenv()


def env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        value = float(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be a number, got {raw!r}")
    if not value > 0:
        raise ConfigurationError(f"{name} must be positive, got {raw!r}")
    return value


def env_int(name: str, default: int, minimum: int = 1) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be an integer, got {raw!r}")
    if value < minimum:
        raise ConfigurationError(f"{name} must be at least {minimum}, got {raw!r}")
    return value


@dataclass(frozen=True)
class Tolerances:
    """Every threshold the numerics compare against"""

    hermitian: float = 1e-9
    psd_clip: float = 1e-9
    trace: float = 1e-9
    norm: float = 1e-9
    prob_clip: float = 1e-12
    prob_sum: float = 1e-9
    majorization: float = 1e-12
    jacobi: float = 1e-12
    completeness: float = 1e-8
    unitarity: float = 1e-9
    su2_det: float = 1e-9
    channel_trace: float = 1e-8
    perfect: float = 1e-9
    spectral_floor: float = 1e-14

    @classmethod
    def from_env(cls) -> "Tolerances":
        values = {
            field.name: env_float(f"QDIST_TOL_{field.name.upper()}", field.default)
            for field in fields(cls)
        }
        return cls(**values)


TOLERANCES = Tolerances.from_env()

LOG_LEVEL = os.getenv("QDIST_LOG_LEVEL", "INFO").upper()
LOG_FILE = os.getenv("QDIST_LOG_FILE") or None
