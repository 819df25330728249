from __future__ import annotations

import json

import pytest

from virtbench.errors import CompareError, ConfigError
from virtbench.evaluators import EvalContext, derive_seed
from virtbench.reporting import emit_json, normalize_json_bytes, report_from_dict
from virtbench.runner import RunConfig, compare_reports, run_benchmark


class TestRunConfig:
    def test_defaults_match_documented_values(self):
        cfg = RunConfig(system="native")
        assert cfg.iterations == 100
        assert cfg.warmup == 10
        assert cfg.tenants == 1
        assert cfg.seed == 42

    @pytest.mark.parametrize("kwargs", [
        {"system": "vmware"},
        {"system": "hami", "iterations": 0},
        {"system": "hami", "warmup": -1},
        {"system": "hami", "tenants": 0},
        {"system": "hami", "compute_limit_percent": 0.0},
        {"system": "hami", "compute_limit_percent": 150.0},
        {"system": "hami", "memory_limit_mb": -10},
    ])
    def test_invalid_configs_rejected(self, kwargs):
        with pytest.raises(ConfigError):
            RunConfig(**kwargs)

    def test_unknown_metric_in_filter(self, catalog):
        cfg = RunConfig(system="hami", metric_filter=["OH-001", "XX-999"])
        with pytest.raises(ConfigError, match="XX-999"):
            run_benchmark(cfg, catalog)


class TestWarmupExclusion:
    def test_sample_keeps_exactly_last_iterations(self, catalog):
        cfg = RunConfig(system="hami", iterations=5, warmup=3)
        ctx = EvalContext(cfg, catalog.calibration)
        drawn: list[int] = []
        samples = ctx.sample(lambda i: drawn.append(i) or float(i))
        assert drawn == [0, 1, 2, 3, 4, 5, 6, 7]
        assert samples == [3.0, 4.0, 5.0, 6.0, 7.0]

    def test_reported_n_equals_iterations(self, catalog):
        cfg = RunConfig(system="fcsp", iterations=7, warmup=4, metric_filter=["OH-001"])
        report = run_benchmark(cfg, catalog)
        assert report.metrics[0].statistics.n == 7

    def test_warmup_draws_consume_the_stream(self, catalog):
        """Mean over the kept samples must equal a manual replay of draws
        warmup..warmup+iterations-1 on an identically seeded backend."""
        from virtbench.sim.backend import Backend, BackendModel
        cfg = RunConfig(system="hami", iterations=6, warmup=2, metric_filter=["OH-004"])
        report = run_benchmark(cfg, catalog)
        model = BackendModel.from_calibration(
            "hami", catalog.calibration, rng_seed=derive_seed(cfg.seed, "OH-004"))
        b = Backend(model)
        draws = [b.sample_latency_us(b.model.base_context_us) for _ in range(8)]
        expected_mean = sum(draws[2:]) / 6
        assert report.metrics[0].statistics.mean == pytest.approx(expected_mean, rel=1e-12)


class TestFilteredRuns:
    def test_single_metric_run(self, catalog):
        cfg = RunConfig(system="mig", iterations=1, warmup=0, metric_filter=["OH-001"])
        report = run_benchmark(cfg, catalog)
        assert [m.id for m in report.metrics] == ["OH-001"]
        assert [c.name for c in report.categories] == ["Overhead"]

    def test_filter_preserves_catalog_order(self, catalog):
        cfg = RunConfig(system="mig", iterations=1, warmup=0,
                        metric_filter=["ERR-003", "OH-001", "LLM-004"])
        report = run_benchmark(cfg, catalog)
        assert [m.id for m in report.metrics] == ["OH-001", "LLM-004", "ERR-003"]

    def test_filtered_results_match_full_run_slices(self, catalog, full_reports):
        full = {m.id: m for m in full_reports["hami"].metrics}
        cfg = RunConfig(system="hami", metric_filter=["OH-001", "IS-008", "LLM-004", "FRAG-001"])
        partial = run_benchmark(cfg, catalog)
        for m in partial.metrics:
            ref = full[m.id]
            assert m.statistics == ref.statistics
            assert m.value == ref.value
            assert m.score == ref.score
            assert m.detail == ref.detail

    def test_partial_run_weights_renormalize(self, catalog, full_reports):
        cfg = RunConfig(system="hami", metric_filter=["OH-001"])
        report = run_benchmark(cfg, catalog)
        assert report.weighted_score == pytest.approx(report.metrics[0].score)


class TestReportShape:
    def test_all_56_metrics_in_catalog_order(self, full_reports, catalog):
        for mode, report in full_reports.items():
            assert [m.id for m in report.metrics] == list(catalog.ordered_ids())

    def test_booleans_reported_as_pass_fail(self, full_reports):
        for report in full_reports.values():
            for mid in ("IS-005", "IS-010"):
                m = next(x for x in report.metrics if x.id == mid)
                assert m.kind == "boolean"
                assert m.passed is True
                assert m.score == 1.0
                assert m.value is None and m.statistics is None

    def test_exactly_one_payload_kind_per_metric(self, full_reports):
        for report in full_reports.values():
            for m in report.metrics:
                populated = [m.statistics is not None, m.value is not None, m.passed is not None]
                assert populated.count(True) == 1, m.id

    def test_mig_scores_all_one(self, full_reports):
        for m in full_reports["mig"].metrics:
            assert m.score == pytest.approx(1.0, abs=1e-9), m.id

    def test_native_has_no_parity_figure(self, full_reports):
        assert full_reports["native"].unweighted_parity is None
        assert full_reports["hami"].unweighted_parity is not None

    def test_ten_categories_on_full_run(self, full_reports):
        for report in full_reports.values():
            assert len(report.categories) == 10


class TestCompare:
    def test_compare_with_self_is_all_zero(self, full_reports):
        report = full_reports["hami"]
        cmp = compare_reports(report, report)
        assert cmp.regression_count == 0
        assert cmp.overall_delta == 0.0
        for e in cmp.entries:
            assert e.status == "ok"
            assert e.score_delta == 0.0
            assert e.mean_delta in (0.0, None)

    def test_fcsp_vs_hami_launch_delta(self, full_reports):
        cmp = compare_reports(full_reports["fcsp"], full_reports["hami"])
        launch = next(e for e in cmp.entries if e.id == "OH-001")
        assert launch.mean_delta == pytest.approx(-6.6, abs=0.35)

    def test_missing_metric_marked_new(self, catalog, full_reports):
        baseline = run_benchmark(RunConfig(system="hami", metric_filter=["OH-001"]), catalog)
        cmp = compare_reports(full_reports["hami"], baseline)
        statuses = {e.id: e.status for e in cmp.entries}
        assert statuses["OH-002"] == "new"
        assert statuses["OH-001"] == "ok"
        assert cmp.regression_count == 0

    def test_version_mismatch_rejected(self, full_reports):
        data = json.loads(emit_json(full_reports["hami"]))
        data["benchmark_version"] = "2.0.0"
        other = report_from_dict(data)
        with pytest.raises(CompareError):
            compare_reports(full_reports["hami"], other)

    def test_regression_detected(self, full_reports):
        data = json.loads(emit_json(full_reports["hami"]))
        data["metrics"][0]["score"] += 0.25  # baseline was better by 25 points
        better = report_from_dict(data)
        cmp = compare_reports(full_reports["hami"], better)
        assert cmp.regression_count == 1
        assert next(e for e in cmp.entries if e.id == "OH-001").status == "regression"


class TestDeterminism:
    def test_same_seed_reproduces_bytes(self, catalog, full_reports):
        again = run_benchmark(RunConfig(system="hami"), catalog)
        a = normalize_json_bytes(emit_json(full_reports["hami"]))
        b = normalize_json_bytes(emit_json(again))
        assert a == b

    def test_different_seed_changes_samples_not_schema(self, catalog, full_reports):
        other = run_benchmark(RunConfig(system="hami", seed=777), catalog)
        base = full_reports["hami"]
        assert [m.id for m in other.metrics] == [m.id for m in base.metrics]
        assert [m.unit for m in other.metrics] == [m.unit for m in base.metrics]
        assert [m.kind for m in other.metrics] == [m.kind for m in base.metrics]
        sampled_means_a = [m.statistics.mean for m in base.metrics if m.kind == "sampled"]
        sampled_means_b = [m.statistics.mean for m in other.metrics if m.kind == "sampled"]
        assert sampled_means_a != sampled_means_b

    def test_per_metric_seed_derivation_is_stable(self):
        assert derive_seed(42, "OH-001") == derive_seed(42, "OH-001")
        assert derive_seed(42, "OH-001") != derive_seed(42, "OH-002")
        assert derive_seed(42, "OH-001") != derive_seed(43, "OH-001")
