"""Run configuration: parsing, validation and the resolved form echoed into reports.

Configuration files are INI-style (`configparser`). Sections and keys:

    [run]        seed (required), policies, output_dir, sequences
    [clock]      fps
    [world]      path | inline | duration_frames, objects, min_speed, max_speed,
                 max_acceleration, classes
    [observer]   kind, position_noise_std, miss_prob, false_positive_rate
    [latency]    kind = constant            -> total_ms
                 kind = shifted-lognormal   -> mean_ms, std_ms, min_ms
                 kind = environment         -> environment (low|medium|high), measured_with
                 kind = trace-replay        -> path
                 preprocess_fraction (all fitted kinds)
    [scheduler]  queue_capacity
    [evaluation] warmup_frames

Relative paths are resolved against the configuration file's directory. Component seeds
(world, observer, latency) derive from run.seed so the whole run follows from one number.
"""

import configparser
import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

import numpy as np

from core.errors import ConfigError
from core.frames import FrameClock
from latency.models import (
    DEFAULT_PREPROCESS_FRACTION,
    LatencyKind,
    LatencyModel,
    constant_model,
    fit_shifted_lognormal,
    trace_replay_model,
)
from latency.presets import DelayEnvironment, environment_model
from scheduler.feature_queue import DEFAULT_QUEUE_CAPACITY
from scheduler.feature_select import PolicyKind
from utils.digest import digest
from worldsim.models import ObserverKind, ObserverSpec, WorldSpec, load_world
from worldsim.world import random_world

logger = logging.getLogger(__name__)

ENVIRONMENT_KIND = "environment"

# Purpose tags for derived seeds
_WORLD_STREAM = 0
_OBSERVER_STREAM = 1
_LATENCY_STREAM = 2


def derive_seed(seed: int, stream: int, index: int = 0) -> int:
    """Independent 32-bit seed for one component of one sequence."""
    return int(np.random.SeedSequence([seed, stream, index]).generate_state(1)[0])


# ============== Sections ==============


@dataclass(frozen=True)
class WorldConfig:
    """Explicit world document or random-world generator settings."""

    spec: Optional[dict[str, Any]] = None
    duration_frames: int = 300
    objects: int = 12
    min_speed: float = 1.0
    max_speed: float = 8.0
    max_acceleration: float = 0.0
    classes: int = 3

    def build(self, seed: int, fps: float, sequence: int) -> WorldSpec:
        if self.spec is not None:
            return WorldSpec.from_dict(self.spec)
        return random_world(
            seed=derive_seed(seed, _WORLD_STREAM, sequence),
            duration_frames=self.duration_frames,
            object_count=self.objects,
            min_speed=self.min_speed,
            max_speed=self.max_speed,
            max_acceleration=self.max_acceleration,
            class_count=self.classes,
            fps=fps,
        )

    def to_dict(self) -> dict[str, Any]:
        if self.spec is not None:
            return {"inline": self.spec}
        return {
            "duration_frames": self.duration_frames,
            "objects": self.objects,
            "min_speed": self.min_speed,
            "max_speed": self.max_speed,
            "max_acceleration": self.max_acceleration,
            "classes": self.classes,
        }


@dataclass(frozen=True)
class ObserverConfig:
    kind: ObserverKind = ObserverKind.ORACLE
    position_noise_std: float = 0.0
    miss_prob: float = 0.0
    false_positive_rate: float = 0.0

    def build(self, seed: int, sequence: int) -> ObserverSpec:
        return ObserverSpec(
            kind=self.kind,
            position_noise_std=self.position_noise_std,
            miss_prob=self.miss_prob,
            false_positive_rate=self.false_positive_rate,
            seed=derive_seed(seed, _OBSERVER_STREAM, sequence),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "position_noise_std": self.position_noise_std,
            "miss_prob": self.miss_prob,
            "false_positive_rate": self.false_positive_rate,
        }


@dataclass(frozen=True)
class LatencyConfig:
    kind: str = LatencyKind.CONSTANT.value
    total_ms: float = 0.0
    mean_ms: float = 0.0
    std_ms: float = 0.0
    min_ms: float = 0.0
    environment: str = DelayEnvironment.HIGH.value
    measured_with: str = "adaptive"
    path: Optional[str] = None
    preprocess_fraction: float = DEFAULT_PREPROCESS_FRACTION

    def build(self, seed: int, sequence: int = 0) -> LatencyModel:
        model_seed = derive_seed(seed, _LATENCY_STREAM, sequence)
        if self.kind == LatencyKind.CONSTANT:
            return constant_model(self.total_ms, self.preprocess_fraction, seed=model_seed)
        if self.kind == LatencyKind.SHIFTED_LOGNORMAL:
            return fit_shifted_lognormal(
                self.mean_ms, self.std_ms, self.min_ms, self.preprocess_fraction, seed=model_seed
            )
        if self.kind == ENVIRONMENT_KIND:
            return environment_model(
                self.environment, self.measured_with, self.preprocess_fraction, seed=model_seed
            )
        assert self.path is not None
        return trace_replay_model(Path(self.path), seed=model_seed)

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"kind": self.kind, "preprocess_fraction": self.preprocess_fraction}
        if self.kind == LatencyKind.CONSTANT:
            data["total_ms"] = self.total_ms
        elif self.kind == LatencyKind.SHIFTED_LOGNORMAL:
            data.update(mean_ms=self.mean_ms, std_ms=self.std_ms, min_ms=self.min_ms)
        elif self.kind == ENVIRONMENT_KIND:
            data.update(environment=self.environment, measured_with=self.measured_with)
        else:
            data["path"] = self.path
        return data


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved experiment configuration."""

    seed: int
    fps: float
    world: WorldConfig
    observer: ObserverConfig
    latency: LatencyConfig
    policies: tuple[PolicyKind, ...] = tuple(PolicyKind)
    sequences: int = 1
    queue_capacity: int = DEFAULT_QUEUE_CAPACITY
    warmup_frames: int = 0
    output_dir: Optional[Path] = field(default=None, compare=False)

    @property
    def clock(self) -> FrameClock:
        return FrameClock(self.fps)

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, seed=seed)

    def to_dict(self) -> dict[str, Any]:
        """Resolved configuration; output_dir is not part of the experiment and is left out."""
        return {
            "run": {
                "seed": self.seed,
                "policies": [policy.value for policy in self.policies],
                "sequences": self.sequences,
            },
            "clock": {"fps": self.fps},
            "world": self.world.to_dict(),
            "observer": self.observer.to_dict(),
            "latency": self.latency.to_dict(),
            "scheduler": {"queue_capacity": self.queue_capacity},
            "evaluation": {"warmup_frames": self.warmup_frames},
        }

    def digest(self) -> str:
        return digest(self.to_dict())


# ============== Parsing Helpers ==============


def _raw(parser: configparser.ConfigParser, section: str, key: str) -> Optional[str]:
    if not parser.has_section(section):
        return None
    value = parser.get(section, key, fallback=None)
    return value.strip() if value is not None else None


def _get_int(
    parser: configparser.ConfigParser,
    section: str,
    key: str,
    default: Optional[int] = None,
    minimum: Optional[int] = None
) -> int:
    raw = _raw(parser, section, key)
    if raw is None or raw == "":
        if default is None:
            raise ConfigError(f"{section}.{key}", "is required")
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{section}.{key}", f"expected an integer, got {raw!r}") from None
    if minimum is not None and value < minimum:
        raise ConfigError(f"{section}.{key}", f"must be >= {minimum}, got {value}")
    return value


def _get_float(
    parser: configparser.ConfigParser,
    section: str,
    key: str,
    default: Optional[float] = None,
    minimum: Optional[float] = None,
    strictly_positive: bool = False
) -> float:
    raw = _raw(parser, section, key)
    if raw is None or raw == "":
        if default is None:
            raise ConfigError(f"{section}.{key}", "is required")
        return default
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{section}.{key}", f"expected a number, got {raw!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{section}.{key}", f"must be finite, got {raw!r}")
    if strictly_positive and value <= 0:
        raise ConfigError(f"{section}.{key}", f"must be > 0, got {value}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{section}.{key}", f"must be >= {minimum}, got {value}")
    return value


def _resolve_path(raw: str, base_dir: Path, field_name: str) -> Path:
    path = Path(raw)
    if not path.is_absolute():
        path = base_dir / path
    if not path.exists():
        raise ConfigError(field_name, f"file not found: {path}")
    return path


def _parse_policies(raw: Optional[str]) -> tuple[PolicyKind, ...]:
    if not raw:
        return tuple(PolicyKind)
    policies = []
    for name in raw.split(","):
        name = name.strip()
        if not name:
            continue
        try:
            policies.append(PolicyKind(name))
        except ValueError:
            choices = ", ".join(p.value for p in PolicyKind)
            raise ConfigError("run.policies", f"unknown policy {name!r} (choose from {choices})") from None
    if not policies:
        raise ConfigError("run.policies", "no policy given")
    return tuple(policies)


def parse_policies(raw: str) -> tuple[PolicyKind, ...]:
    """Parse a comma-separated policy list as given on the command line."""
    return _parse_policies(raw)


# ============== Section Parsers ==============


def _parse_world(parser: configparser.ConfigParser, base_dir: Path, fps: float) -> WorldConfig:
    path = _raw(parser, "world", "path")
    inline = _raw(parser, "world", "inline")
    if path and inline:
        raise ConfigError("world.path", "give either world.path or world.inline, not both")

    if path or inline:
        try:
            if path:
                world = load_world(_resolve_path(path, base_dir, "world.path"))
            else:
                world = WorldSpec.from_dict(json.loads(inline))
        except ConfigError:
            raise
        except (ValueError, KeyError, TypeError) as e:
            field_name = "world.path" if path else "world.inline"
            raise ConfigError(field_name, f"invalid world spec: {e}") from None
        if abs(world.fps - fps) > 1e-9:
            raise ConfigError("clock.fps", f"clock fps {fps} differs from world fps {world.fps}")
        return WorldConfig(spec=world.to_dict())

    min_speed = _get_float(parser, "world", "min_speed", 1.0, minimum=0.0)
    max_speed = _get_float(parser, "world", "max_speed", 8.0, minimum=0.0)
    if max_speed < min_speed:
        raise ConfigError("world.max_speed", f"must be >= world.min_speed ({min_speed})")
    return WorldConfig(
        duration_frames=_get_int(parser, "world", "duration_frames", 300, minimum=2),
        objects=_get_int(parser, "world", "objects", 12, minimum=1),
        min_speed=min_speed,
        max_speed=max_speed,
        max_acceleration=_get_float(parser, "world", "max_acceleration", 0.0, minimum=0.0),
        classes=_get_int(parser, "world", "classes", 3, minimum=1),
    )


def _parse_observer(parser: configparser.ConfigParser) -> ObserverConfig:
    raw_kind = _raw(parser, "observer", "kind") or ObserverKind.ORACLE.value
    try:
        kind = ObserverKind(raw_kind)
    except ValueError:
        raise ConfigError("observer.kind", f"unknown observer {raw_kind!r}") from None
    miss_prob = _get_float(parser, "observer", "miss_prob", 0.0, minimum=0.0)
    if miss_prob > 1.0:
        raise ConfigError("observer.miss_prob", f"must be <= 1, got {miss_prob}")
    return ObserverConfig(
        kind=kind,
        position_noise_std=_get_float(parser, "observer", "position_noise_std", 0.0, minimum=0.0),
        miss_prob=miss_prob,
        false_positive_rate=_get_float(parser, "observer", "false_positive_rate", 0.0, minimum=0.0),
    )


def _parse_latency(parser: configparser.ConfigParser, base_dir: Path) -> LatencyConfig:
    kind = _raw(parser, "latency", "kind")
    if not kind:
        raise ConfigError("latency.kind", "is required")
    fraction = _get_float(parser, "latency", "preprocess_fraction", DEFAULT_PREPROCESS_FRACTION)
    if not 0.0 < fraction < 1.0:
        raise ConfigError("latency.preprocess_fraction", f"must be in (0, 1), got {fraction}")

    if kind == LatencyKind.CONSTANT:
        return LatencyConfig(
            kind=kind,
            total_ms=_get_float(parser, "latency", "total_ms", minimum=0.0),
            preprocess_fraction=fraction,
        )
    if kind == LatencyKind.SHIFTED_LOGNORMAL:
        mean_ms = _get_float(parser, "latency", "mean_ms", minimum=0.0)
        std_ms = _get_float(parser, "latency", "std_ms", minimum=0.0)
        min_ms = _get_float(parser, "latency", "min_ms", minimum=0.0)
        if mean_ms <= min_ms:
            raise ConfigError("latency.mean_ms", f"must exceed latency.min_ms ({min_ms})")
        return LatencyConfig(kind=kind, mean_ms=mean_ms, std_ms=std_ms, min_ms=min_ms, preprocess_fraction=fraction)
    if kind == ENVIRONMENT_KIND:
        environment = _raw(parser, "latency", "environment") or ""
        if environment not in {env.value for env in DelayEnvironment}:
            raise ConfigError("latency.environment", f"expected low, medium or high, got {environment!r}")
        measured_with = _raw(parser, "latency", "measured_with") or "adaptive"
        if measured_with not in {"adaptive", "baseline"}:
            raise ConfigError("latency.measured_with", f"expected adaptive or baseline, got {measured_with!r}")
        return LatencyConfig(
            kind=kind, environment=environment, measured_with=measured_with, preprocess_fraction=fraction
        )
    if kind == LatencyKind.TRACE_REPLAY:
        raw_path = _raw(parser, "latency", "path")
        if not raw_path:
            raise ConfigError("latency.path", "is required for trace replay")
        return LatencyConfig(kind=kind, path=str(_resolve_path(raw_path, base_dir, "latency.path")))

    raise ConfigError("latency.kind", f"unknown latency model {kind!r}")


def parse_run_config(text: str, base_dir: Path = Path(".")) -> RunConfig:
    """Parse configuration text; raises ConfigError naming the offending field."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as e:
        raise ConfigError("config", f"cannot parse: {e}") from None

    seed = _get_int(parser, "run", "seed", minimum=0)
    fps = _get_float(parser, "clock", "fps", 30.0, strictly_positive=True)
    world = _parse_world(parser, base_dir, fps)
    sequences = _get_int(parser, "run", "sequences", 1, minimum=1)
    if world.spec is not None and sequences != 1:
        raise ConfigError("run.sequences", "an explicit world supports a single sequence")

    raw_output = _raw(parser, "run", "output_dir")
    return RunConfig(
        seed=seed,
        fps=fps,
        world=world,
        observer=_parse_observer(parser),
        latency=_parse_latency(parser, base_dir),
        policies=_parse_policies(_raw(parser, "run", "policies")),
        sequences=sequences,
        queue_capacity=_get_int(parser, "scheduler", "queue_capacity", DEFAULT_QUEUE_CAPACITY, minimum=1),
        warmup_frames=_get_int(parser, "evaluation", "warmup_frames", 0, minimum=0),
        output_dir=(base_dir / raw_output) if raw_output else None,
    )


def load_run_config(path: Path, seed: Optional[int] = None) -> RunConfig:
    """Read a configuration file; seed, when given, overrides run.seed."""
    path = Path(path)
    if not path.exists():
        raise ConfigError("config", f"file not found: {path}")
    config = parse_run_config(path.read_text(encoding="utf-8"), base_dir=path.parent)
    if seed is not None:
        if seed < 0:
            raise ConfigError("run.seed", f"must be >= 0, got {seed}")
        config = config.with_seed(seed)
    logger.info("Loaded run config %s (seed=%d)", path, config.seed)
    return config


def run_config_from_dict(data: dict[str, Any]) -> RunConfig:
    """Rebuild a configuration from its resolved form (as embedded in reports)."""
    try:
        world_data = data["world"]
        if "inline" in world_data:
            world = WorldConfig(spec=world_data["inline"])
        else:
            world = WorldConfig(**world_data)
        observer_data = dict(data["observer"])
        observer = ObserverConfig(kind=ObserverKind(observer_data.pop("kind")), **observer_data)
        return RunConfig(
            seed=int(data["run"]["seed"]),
            fps=float(data["clock"]["fps"]),
            world=world,
            observer=observer,
            latency=LatencyConfig(**data["latency"]),
            policies=tuple(PolicyKind(p) for p in data["run"]["policies"]),
            sequences=int(data["run"]["sequences"]),
            queue_capacity=int(data["scheduler"]["queue_capacity"]),
            warmup_frames=int(data["evaluation"]["warmup_frames"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError("config", f"invalid resolved configuration: {e}") from None
