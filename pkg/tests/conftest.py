from pathlib import Path

import pytest

from core.frames import FrameClock
from worldsim.models import ObjectTrack, WorldSpec

# Large interior boxes moving at most 2 px/frame per axis: a one-frame localization error
# keeps IoU above 0.95, a two-frame error does not.
CONSTANT_VELOCITY_TRACKS = (
    ObjectTrack(track_id=0, class_id=0, box=(100.0, 100.0, 220.0, 220.0), velocity=(2.0, 0.0)),
    ObjectTrack(track_id=1, class_id=1, box=(300.0, 500.0, 440.0, 620.0), velocity=(2.0, 0.0)),
    ObjectTrack(track_id=2, class_id=0, box=(1500.0, 300.0, 1630.0, 450.0), velocity=(-2.0, 0.0)),
    ObjectTrack(track_id=3, class_id=1, box=(800.0, 100.0, 950.0, 230.0), velocity=(0.0, 2.0)),
)


def make_world(duration_frames: int = 300, fps: float = 30.0) -> WorldSpec:
    return WorldSpec(duration_frames=duration_frames, objects=CONSTANT_VELOCITY_TRACKS, fps=fps, seed=0)


@pytest.fixture
def clock() -> FrameClock:
    return FrameClock(30.0)


@pytest.fixture
def world() -> WorldSpec:
    return make_world()


def write_config(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


SMALL_RUN_CONFIG = """
[run]
seed = 11
policies = no_forecast,fixed_next_step,delay_adaptive

[clock]
fps = 30

[world]
duration_frames = 60
objects = 5
min_speed = 1.0
max_speed = 4.0
classes = 2

[observer]
kind = noisy
position_noise_std = 1.0
miss_prob = 0.05
false_positive_rate = 0.1

[latency]
kind = environment
environment = medium

[evaluation]
warmup_frames = 3
"""


@pytest.fixture
def small_config(tmp_path: Path) -> Path:
    return write_config(tmp_path / "small.cfg", SMALL_RUN_CONFIG)
