"""Measured delay environments (low / medium / high load) as fitted latency models.

Each environment was measured twice: once while running the next-frame forecaster
("baseline") and once while running the delay-adaptive detector ("adaptive"). The
maximum delay is kept for reporting; only mean, std and min are fitted.
"""

from dataclasses import dataclass
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        def __str__(self) -> str:
            return str(self.value)

        def __format__(self, format_spec: str) -> str:
            return str.__format__(str(self.value), format_spec)


from latency.models import DEFAULT_PREPROCESS_FRACTION, LatencyModel, fit_shifted_lognormal


class DelayEnvironment(StrEnum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


@dataclass(frozen=True)
class EnvironmentStats:
    """Observed delay statistics in ms."""

    mean_ms: float
    std_ms: float
    min_ms: float
    max_ms: float


ENVIRONMENT_STATS: dict[DelayEnvironment, dict[str, EnvironmentStats]] = {
    DelayEnvironment.LOW: {
        "baseline": EnvironmentStats(23.5, 3.2, 21.8, 69.1),
        "adaptive": EnvironmentStats(24.1, 3.66, 21.9, 66.0),
    },
    DelayEnvironment.MEDIUM: {
        "baseline": EnvironmentStats(40.1, 9.35, 22.3, 86.8),
        "adaptive": EnvironmentStats(39.3, 9.22, 22.3, 88.0),
    },
    DelayEnvironment.HIGH: {
        "baseline": EnvironmentStats(63.0, 12.5, 41.7, 121.0),
        "adaptive": EnvironmentStats(63.1, 12.7, 41.3, 124.0),
    },
}


def environment_stats(environment: str, measured_with: str = "adaptive") -> EnvironmentStats:
    """Look up observed statistics; raises ValueError for unknown names."""
    env = DelayEnvironment(environment)
    rows = ENVIRONMENT_STATS[env]
    if measured_with not in rows:
        raise ValueError(f"unknown measurement row {measured_with!r}, expected one of {sorted(rows)}")
    return rows[measured_with]


def environment_model(
    environment: str,
    measured_with: str = "adaptive",
    preprocess_fraction: float = DEFAULT_PREPROCESS_FRACTION,
    seed: int = 0
) -> LatencyModel:
    """Shifted log-normal fitted to a named delay environment."""
    stats = environment_stats(environment, measured_with)
    return fit_shifted_lognormal(
        stats.mean_ms,
        stats.std_ms,
        stats.min_ms,
        preprocess_fraction=preprocess_fraction,
        seed=seed,
    )
