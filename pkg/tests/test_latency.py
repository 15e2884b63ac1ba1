import math
from pathlib import Path

import numpy as np
import pytest

from core.errors import TraceExhaustedError, TraceFormatError
from latency.models import (
    DelaySample,
    LatencyKind,
    LatencySampler,
    constant_model,
    fit_shifted_lognormal,
    sample,
    split_delay,
    trace_replay_model,
)
from latency.presets import DelayEnvironment, environment_model, environment_stats
from latency.traces import DelayTrace, load_trace, sample_trace, save_trace, summarize_delays


class TestFitShiftedLognormal:
    @pytest.mark.parametrize(
        "mean_ms, std_ms, min_ms",
        [(24.1, 3.66, 21.9), (39.3, 9.22, 22.3), (63.1, 12.7, 41.3)],
    )
    def test_measured_environments_reproduce_moments(self, mean_ms, std_ms, min_ms):
        model = fit_shifted_lognormal(mean_ms, std_ms, min_ms, seed=0)
        totals = sample_trace(model, 15_000).totals()
        assert abs(totals.mean() - mean_ms) <= 1.0
        assert abs(totals.std() - std_ms) <= 1.5
        assert totals.min() >= min_ms - 1e-9

    def test_analytic_moments_match_targets(self):
        model = fit_shifted_lognormal(40.0, 9.0, 22.0)
        mean, std = model.analytic_moments()
        assert mean == pytest.approx(40.0)
        assert std == pytest.approx(9.0)

    def test_parameters(self):
        model = fit_shifted_lognormal(30.0, 5.0, 20.0)
        sigma2 = math.log(1 + 25.0 / 100.0)
        assert model.log_sigma == pytest.approx(math.sqrt(sigma2))
        assert model.log_mu == pytest.approx(math.log(10.0) - sigma2 / 2)

    def test_zero_std_degenerates_to_constant(self):
        model = fit_shifted_lognormal(30.0, 0.0, 20.0)
        assert model.kind == LatencyKind.CONSTANT
        assert model.mean_ms == 30.0

    @pytest.mark.parametrize("mean_ms, min_ms", [(20.0, 20.0), (10.0, 20.0)])
    def test_mean_must_exceed_min(self, mean_ms, min_ms):
        with pytest.raises(ValueError):
            fit_shifted_lognormal(mean_ms, 3.0, min_ms)


class TestSampler:
    def test_same_seed_same_draws(self):
        model = fit_shifted_lognormal(40.0, 9.0, 22.0, seed=5)
        a, b = LatencySampler(model), LatencySampler(model)
        assert [a.sample() for _ in range(50)] == [b.sample() for _ in range(50)]

    def test_different_seeds_differ(self):
        a = LatencySampler(fit_shifted_lognormal(40.0, 9.0, 22.0, seed=1))
        b = LatencySampler(fit_shifted_lognormal(40.0, 9.0, 22.0, seed=2))
        assert [a.sample() for _ in range(10)] != [b.sample() for _ in range(10)]

    def test_constant_model_split(self):
        sampler = LatencySampler(constant_model(40.0, preprocess_fraction=0.25))
        drawn = sampler.sample()
        assert drawn == DelaySample(10.0, 30.0)
        assert sampler.draw_index == 1

    def test_sample_checks_model(self):
        sampler = LatencySampler(constant_model(40.0))
        with pytest.raises(ValueError):
            sample(constant_model(50.0), sampler)

    def test_replay_exhausts(self):
        sampler = LatencySampler.from_samples([DelaySample(1.0, 2.0)])
        assert sampler.sample().total_ms == 3.0
        with pytest.raises(TraceExhaustedError):
            sampler.sample()

    def test_split_sums_to_total(self):
        rng = np.random.default_rng(0)
        for total in rng.uniform(0, 200, size=100):
            split = split_delay(float(total), 0.3)
            assert split.total_ms == pytest.approx(round(float(total), 6), abs=1e-6)


class TestTraces:
    def test_csv_round_trip_is_exact(self, tmp_path: Path):
        trace = sample_trace(fit_shifted_lognormal(63.1, 12.7, 41.3, seed=9), 200)
        path = tmp_path / "delays.csv"
        save_trace(trace, path)
        assert load_trace(path).samples == trace.samples

    def test_replay_model_reads_file(self, tmp_path: Path):
        path = tmp_path / "trace.csv"
        path.write_text("preprocess_ms,inference_ms\n1.5,2.5\n\n3.0,4.0\n", encoding="utf-8")
        sampler = LatencySampler(trace_replay_model(path))
        assert [sampler.sample().total_ms for _ in range(2)] == [4.0, 7.0]

    def test_bad_header(self, tmp_path: Path):
        path = tmp_path / "trace.csv"
        path.write_text("p,i\n1,2\n", encoding="utf-8")
        with pytest.raises(TraceFormatError):
            load_trace(path)

    def test_error_names_line(self, tmp_path: Path):
        path = tmp_path / "trace.csv"
        path.write_text("preprocess_ms,inference_ms\n1,2\n1,-2\n", encoding="utf-8")
        with pytest.raises(TraceFormatError, match="line 3"):
            load_trace(path)

    def test_header_only_is_empty(self, tmp_path: Path):
        path = tmp_path / "trace.csv"
        path.write_text("preprocess_ms,inference_ms\n", encoding="utf-8")
        assert len(load_trace(path)) == 0

    def test_non_numeric_row_names_line(self, tmp_path: Path):
        path = tmp_path / "trace.csv"
        path.write_text("preprocess_ms,inference_ms\n1,2\nfast,2\n", encoding="utf-8")
        with pytest.raises(TraceFormatError, match="line 3"):
            load_trace(path)

    def test_summary_of_empty(self):
        assert summarize_delays([]).count == 0

    def test_summary_uses_population_std(self):
        stats = summarize_delays([10.0, 20.0])
        assert (stats.mean_ms, stats.std_ms, stats.min_ms, stats.max_ms) == (15.0, 5.0, 10.0, 20.0)

    def test_trace_stats(self):
        trace = DelayTrace.from_samples([DelaySample(1.0, 1.0), DelaySample(2.0, 2.0)])
        assert len(trace) == 2
        assert trace.stats.mean_ms == 3.0


class TestPresets:
    def test_every_environment_has_both_rows(self):
        for env in DelayEnvironment:
            for row in ("baseline", "adaptive"):
                stats = environment_stats(env, row)
                assert stats.min_ms < stats.mean_ms < stats.max_ms

    def test_high_environment_never_meets_frame_budget(self):
        totals = sample_trace(environment_model("high", seed=1), 2000).totals()
        assert np.all(totals > 1000.0 / 30.0)

    def test_unknown_environment(self):
        with pytest.raises(ValueError):
            environment_model("extreme")
