"""Pipeline latency models and their samplers.

A model draws a total per-job delay and splits it into the preprocessing share P_t and the
inference share I_t. Fitted models are shifted log-normals moment-matched to a target
mean/std above a minimum delay.
"""

import logging
import math
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

from pathlib import Path
from typing import Any, Optional

import numpy as np

from core.errors import TraceExhaustedError

logger = logging.getLogger(__name__)

DEFAULT_PREPROCESS_FRACTION = 0.25

# Delays are kept at nanosecond resolution so CSV traces round-trip exactly
DELAY_DECIMALS = 6


def quantize_ms(value: float) -> float:
    """Round a delay to the resolution used by trace files."""
    return round(value, DELAY_DECIMALS)


class LatencyKind(StrEnum):
    """Supported latency model families."""

    CONSTANT = "constant"
    SHIFTED_LOGNORMAL = "shifted-lognormal"
    TRACE_REPLAY = "trace-replay"


@dataclass(frozen=True)
class DelaySample:
    """Latency of one pipeline job: preprocessing P_t and inference I_t."""

    preprocess_ms: float
    inference_ms: float

    def __post_init__(self) -> None:
        for name, value in (("preprocess_ms", self.preprocess_ms), ("inference_ms", self.inference_ms)):
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and non-negative, got {value}")

    @property
    def total_ms(self) -> float:
        return self.preprocess_ms + self.inference_ms


@dataclass(frozen=True)
class LatencyModel:
    """Immutable description of a delay distribution."""

    kind: LatencyKind
    mean_ms: float = 0.0
    std_ms: float = 0.0
    min_ms: float = 0.0
    trace_path: Optional[Path] = None
    preprocess_fraction: float = DEFAULT_PREPROCESS_FRACTION
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.preprocess_fraction < 1.0:
            raise ValueError(f"preprocess_fraction must be in (0, 1), got {self.preprocess_fraction}")
        if self.kind == LatencyKind.CONSTANT:
            if not math.isfinite(self.mean_ms) or self.mean_ms < 0:
                raise ValueError(f"constant delay must be finite and >= 0, got {self.mean_ms}")
        elif self.kind == LatencyKind.SHIFTED_LOGNORMAL:
            if not self.min_ms >= 0:
                raise ValueError(f"min_ms must be >= 0, got {self.min_ms}")
            if not self.mean_ms > self.min_ms:
                raise ValueError(f"mean_ms ({self.mean_ms}) must exceed min_ms ({self.min_ms})")
            if not self.std_ms > 0:
                raise ValueError(f"std_ms must be > 0, got {self.std_ms}")
        elif self.trace_path is None:
            raise ValueError("trace-replay model needs a trace_path")

    # ============== Log-normal Parameters ==============

    @property
    def log_sigma(self) -> float:
        """Shape parameter sigma of the underlying log-normal."""
        excess = self.mean_ms - self.min_ms
        return math.sqrt(math.log1p(self.std_ms**2 / excess**2))

    @property
    def log_mu(self) -> float:
        """Location parameter mu of the underlying log-normal."""
        excess = self.mean_ms - self.min_ms
        return math.log(excess) - self.log_sigma**2 / 2.0

    def analytic_moments(self) -> tuple[float, float]:
        """Mean and std implied by the distribution parameters (not the targets)."""
        if self.kind == LatencyKind.CONSTANT:
            return self.mean_ms, 0.0
        if self.kind != LatencyKind.SHIFTED_LOGNORMAL:
            raise ValueError("analytic moments are undefined for trace replay")
        sigma2 = self.log_sigma**2
        mean = self.min_ms + math.exp(self.log_mu + sigma2 / 2.0)
        std = math.sqrt(math.expm1(sigma2)) * math.exp(self.log_mu + sigma2 / 2.0)
        return mean, std

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "kind": self.kind.value,
            "preprocess_fraction": self.preprocess_fraction,
            "seed": self.seed,
        }
        if self.kind == LatencyKind.CONSTANT:
            data["total_ms"] = self.mean_ms
        elif self.kind == LatencyKind.SHIFTED_LOGNORMAL:
            data.update(mean_ms=self.mean_ms, std_ms=self.std_ms, min_ms=self.min_ms)
        else:
            data["path"] = str(self.trace_path)
        return data


# ============== Constructors ==============


def constant_model(
    total_ms: float,
    preprocess_fraction: float = DEFAULT_PREPROCESS_FRACTION,
    seed: int = 0
) -> LatencyModel:
    """Every job takes exactly total_ms."""
    return LatencyModel(
        kind=LatencyKind.CONSTANT,
        mean_ms=total_ms,
        min_ms=total_ms,
        preprocess_fraction=preprocess_fraction,
        seed=seed,
    )


def fit_shifted_lognormal(
    mean_ms: float,
    std_ms: float,
    min_ms: float,
    preprocess_fraction: float = DEFAULT_PREPROCESS_FRACTION,
    seed: int = 0
) -> LatencyModel:
    """Moment-match min_ms + LogNormal(mu, sigma) to the target mean and std.

    With m = mean - min and v = std^2: sigma^2 = ln(1 + v / m^2), mu = ln(m) - sigma^2 / 2.
    A zero std degenerates to a constant model at mean_ms.
    """
    if not mean_ms > min_ms:
        raise ValueError(f"mean_ms ({mean_ms}) must exceed min_ms ({min_ms})")
    if std_ms < 0:
        raise ValueError(f"std_ms must be >= 0, got {std_ms}")
    if std_ms == 0:
        logger.info("Zero std requested, using constant %.3f ms model", mean_ms)
        return constant_model(mean_ms, preprocess_fraction=preprocess_fraction, seed=seed)

    return LatencyModel(
        kind=LatencyKind.SHIFTED_LOGNORMAL,
        mean_ms=mean_ms,
        std_ms=std_ms,
        min_ms=min_ms,
        preprocess_fraction=preprocess_fraction,
        seed=seed,
    )


def trace_replay_model(path: Path, seed: int = 0) -> LatencyModel:
    """Replay recorded (P_t, I_t) pairs from a CSV trace."""
    return LatencyModel(kind=LatencyKind.TRACE_REPLAY, trace_path=Path(path), seed=seed)


# ============== Sampling ==============


class LatencySampler:
    """Private, seeded draw stream over one latency model.

    Draw i of a sampler depends only on the model seed and i.
    """

    def __init__(self, model: LatencyModel, replay: Optional[list[DelaySample]] = None) -> None:
        self.model = model
        self.draw_index = 0
        self._rng = np.random.default_rng(model.seed)
        self._replay = replay
        if model.kind == LatencyKind.TRACE_REPLAY and replay is None:
            # Local import keeps traces.py free to import this module
            from latency.traces import load_trace

            self._replay = list(load_trace(model.trace_path).samples)

    @classmethod
    def from_samples(cls, samples: list[DelaySample], seed: int = 0) -> "LatencySampler":
        """Replay an in-memory sequence (used to share one trace across policies)."""
        model = LatencyModel(kind=LatencyKind.TRACE_REPLAY, trace_path=Path("<memory>"), seed=seed)
        return cls(model, replay=list(samples))

    def sample(self) -> DelaySample:
        """Draw the next job's delay."""
        model = self.model
        if model.kind == LatencyKind.TRACE_REPLAY:
            assert self._replay is not None
            if self.draw_index >= len(self._replay):
                raise TraceExhaustedError(
                    f"trace {model.trace_path} exhausted after {len(self._replay)} samples"
                )
            result = self._replay[self.draw_index]
            self.draw_index += 1
            return result

        if model.kind == LatencyKind.CONSTANT:
            total = model.mean_ms
        else:
            total = model.min_ms + float(self._rng.lognormal(mean=model.log_mu, sigma=model.log_sigma))
        self.draw_index += 1
        return split_delay(total, model.preprocess_fraction)


def split_delay(total_ms: float, preprocess_fraction: float) -> DelaySample:
    """Attribute preprocess_fraction of total_ms to P_t and the rest to I_t."""
    total_ms = quantize_ms(total_ms)
    preprocess = quantize_ms(preprocess_fraction * total_ms)
    inference = quantize_ms(total_ms - preprocess)
    return DelaySample(preprocess_ms=preprocess, inference_ms=inference)


def sample(model: LatencyModel, sampler: LatencySampler) -> DelaySample:
    """Draw one sample of model from the sampler's stream."""
    if sampler.model is not model and sampler.model != model:
        raise ValueError("sampler was built for a different latency model")
    return sampler.sample()
