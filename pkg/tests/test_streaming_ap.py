"""End-to-end streaming AP: perfect pipelines, constant delays and measured delay environments."""

import numpy as np
import pytest

from cli.commands import run_experiment
from cli.run_config import parse_run_config
from conftest import make_world
from core.errors import DigestMismatchError
from core.frames import FrameClock
from latency.models import LatencySampler, constant_model
from scheduler.feature_select import PolicyKind
from streameval.evaluator import evaluate_sequences, streaming_ap
from streameval.pipeline import simulate
from worldsim.models import ObserverSpec
from worldsim.world import ground_truth_frames, random_world

CLOCK = FrameClock(30.0)


def constant_delay_report(policy, total_ms, warmup_frames=0, duration_frames=300):
    world = make_world(duration_frames)
    log = simulate(world, ObserverSpec(), LatencySampler(constant_model(total_ms)), policy, CLOCK)
    return streaming_ap(world, log, CLOCK, warmup_frames=warmup_frames)


class TestPerfectPipeline:
    def test_zero_latency_oracle_scores_one(self):
        report = constant_delay_report(PolicyKind.NO_FORECAST, 0.0)
        assert report.sap == 1.0
        assert report.sap50 == report.sap75 == report.sap_large == 1.0
        # Every box in this world is large
        assert report.sap_small is None and report.sap_medium is None
        assert report.dropped_frames == 0
        assert report.realtime_violation_rate == 0.0

    def test_ingested_frames_score_like_the_world(self):
        world = make_world(30)
        log = simulate(world, ObserverSpec(), LatencySampler(constant_model(0.0)), PolicyKind.NO_FORECAST, CLOCK)
        assert streaming_ap(ground_truth_frames(world), log, CLOCK).sap == 1.0


class TestConstantDelay:
    """50 ms at 30 FPS: two frames of latency, n = 2 for the adaptive policy."""

    @pytest.fixture(scope="class")
    def reports(self):
        return {
            policy: constant_delay_report(policy, 50.0, warmup_frames=5)
            for policy in PolicyKind
        }

    def test_delay_adaptive_is_exact(self, reports):
        assert reports[PolicyKind.DELAY_ADAPTIVE].sap == 1.0

    def test_fixed_next_step_is_lower(self, reports):
        assert reports[PolicyKind.FIXED_NEXT_STEP].sap < reports[PolicyKind.DELAY_ADAPTIVE].sap

    def test_no_forecast_is_lowest(self, reports):
        assert reports[PolicyKind.NO_FORECAST].sap < reports[PolicyKind.FIXED_NEXT_STEP].sap

    def test_adaptive_output_is_at_most_one_frame_stale(self):
        world = make_world(120)
        log = simulate(world, ObserverSpec(), LatencySampler(constant_model(50.0)), PolicyKind.DELAY_ADAPTIVE, CLOCK)
        staleness = []
        for k in range(5, world.duration_frames):
            job = log.latest_job(CLOCK.capture_time(k))
            staleness.append(abs(job.input_frame_index + job.target_n - k))
        # Each output is shown at two query instants and only matches one of them
        assert max(staleness) == 1
        assert staleness.count(0) > 0

    def test_cold_start_counts_without_warmup(self):
        assert constant_delay_report(PolicyKind.DELAY_ADAPTIVE, 50.0).sap < 1.0

    def test_delay_statistics(self, reports):
        report = reports[PolicyKind.DELAY_ADAPTIVE]
        assert report.delay_stats.mean_ms == 50.0
        assert report.realtime_violation_rate == 1.0
        assert report.target_steps == {1: 1, 2: report.job_count - 1}
        assert report.dropped_frames == 300 - report.job_count

    def test_more_latency_never_helps_a_plain_detector(self):
        saps = [constant_delay_report(PolicyKind.NO_FORECAST, total, duration_frames=120).sap
                for total in (0.0, 50.0, 100.0, 200.0)]
        assert saps == sorted(saps, reverse=True)
        assert saps[-1] < saps[0]


class TestDegradationWithDelay:
    @pytest.mark.parametrize("policy", list(PolicyKind))
    def test_sap_falls_as_delay_grows(self, policy):
        world = random_world(seed=3, min_speed=4.0, max_speed=10.0)
        saps = []
        for total_ms in (10.0, 40.0, 70.0):
            log = simulate(world, ObserverSpec(), LatencySampler(constant_model(total_ms)), policy, CLOCK)
            saps.append(streaming_ap(world, log, CLOCK).sap)
        assert saps[0] > saps[1] > saps[2]


class TestEvaluation:
    def test_world_digest_is_checked(self):
        world = make_world(20)
        log = simulate(world, ObserverSpec(), LatencySampler(constant_model(0.0)), PolicyKind.NO_FORECAST, CLOCK)
        with pytest.raises(DigestMismatchError):
            streaming_ap(random_world(seed=1, duration_frames=20), log, CLOCK)

    def test_fps_is_checked(self):
        world = make_world(20)
        log = simulate(world, ObserverSpec(), LatencySampler(constant_model(0.0)), PolicyKind.NO_FORECAST, CLOCK)
        with pytest.raises(ValueError):
            streaming_ap(world, log, FrameClock(60.0))

    def test_pooled_sequences(self):
        worlds = [random_world(seed=s, duration_frames=30, object_count=4) for s in range(3)]
        runs = [
            (world, simulate(world, ObserverSpec(), LatencySampler(constant_model(0.0)),
                             PolicyKind.NO_FORECAST, CLOCK, sequence=s))
            for s, world in enumerate(worlds)
        ]
        report = evaluate_sequences(runs, CLOCK)
        assert report.sap == 1.0
        assert len(report.frame_matches) == 90

    def test_policies_cannot_be_pooled(self):
        world = make_world(20)
        runs = [
            (world, simulate(world, ObserverSpec(), LatencySampler(constant_model(0.0)), policy, CLOCK))
            for policy in (PolicyKind.NO_FORECAST, PolicyKind.DELAY_ADAPTIVE)
        ]
        with pytest.raises(ValueError):
            evaluate_sequences(runs, CLOCK)

    def test_report_dict_has_all_ap_fields(self):
        data = constant_delay_report(PolicyKind.NO_FORECAST, 0.0, duration_frames=20).to_dict()
        for key in ("sap", "sap50", "sap75", "sap_small", "sap_medium", "sap_large", "sap_50_75"):
            assert key in data


ENVIRONMENT_CONFIG = """
[run]
seed = {seed}
policies = no_forecast,fixed_next_step,delay_adaptive

[clock]
fps = 30

[world]
duration_frames = 100
objects = 8
min_speed = 3.0
max_speed = 8.0
classes = 2

[observer]
kind = noisy
position_noise_std = 2.0
miss_prob = 0.05

[latency]
kind = environment
environment = {environment}

[evaluation]
warmup_frames = 5
"""


class TestDelayEnvironments:
    """Gain of delay_adaptive over fixed_next_step grows with the delay environment."""

    @pytest.fixture(scope="class")
    def saps(self):
        saps = {}
        for environment in ("low", "medium", "high"):
            per_seed = []
            for seed in range(5):
                config = parse_run_config(ENVIRONMENT_CONFIG.format(seed=seed, environment=environment))
                reports = run_experiment(config).reports
                per_seed.append({policy: report.sap for policy, report in reports.items()})
            saps[environment] = {
                policy: float(np.mean([run[policy] for run in per_seed])) for policy in PolicyKind
            }
        return saps

    @pytest.fixture(scope="class")
    def gaps(self, saps):
        return {
            environment: means[PolicyKind.DELAY_ADAPTIVE] - means[PolicyKind.FIXED_NEXT_STEP]
            for environment, means in saps.items()
        }

    def test_low_delay_makes_no_difference(self, gaps):
        assert abs(gaps["low"]) <= 0.01

    def test_adaptive_wins_under_medium_and_high_delay(self, gaps):
        assert gaps["medium"] > 0.0
        assert gaps["high"] > 0.0

    def test_gain_does_not_shrink_with_delay(self, gaps):
        assert gaps["high"] >= gaps["medium"] - 0.005

    @pytest.mark.parametrize("environment", ["medium", "high"])
    def test_forecasting_beats_plain_detection(self, saps, environment):
        assert saps[environment][PolicyKind.FIXED_NEXT_STEP] >= saps[environment][PolicyKind.NO_FORECAST]
