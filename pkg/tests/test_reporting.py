from __future__ import annotations

import csv
import io
import json

import pytest

from virtbench.reporting import (
    CSV_HEADER,
    emit_csv,
    emit_json,
    emit_txt,
    normalize_json_bytes,
    report_from_dict,
    write_reports,
)
from virtbench.runner import RunConfig, run_benchmark

from conftest import GOLDEN_DIR, ALL_MODES


class TestJson:
    def test_round_trip_is_byte_identical(self, full_reports):
        for report in full_reports.values():
            raw = emit_json(report)
            again = emit_json(report_from_dict(json.loads(raw.decode())))
            assert again == raw

    def test_top_level_key_order_fixed(self, full_reports):
        data = json.loads(emit_json(full_reports["hami"]))
        assert list(data) == ["benchmark_version", "system", "config", "generated_at",
                              "metrics", "categories", "overall"]

    def test_published_schema_fields(self, full_reports):
        data = json.loads(emit_json(full_reports["hami"]))
        assert data["benchmark_version"] == "1.0.0"
        assert data["system"]["name"] == "hami"
        first = data["metrics"][0]
        assert first["id"] == "OH-001"
        assert first["name"] == "Kernel Launch Latency"
        for key in ("mean", "p99", "stddev"):
            assert key in first["statistics"]
        for key in ("mig_expected", "mig_gap_percent", "mig_deviation_percent"):
            assert key in first["mig_comparison"]
        assert first["mig_comparison"]["mig_expected"] == 5.0

    def test_boolean_metric_payload(self, full_reports):
        data = json.loads(emit_json(full_reports["hami"]))
        is005 = next(m for m in data["metrics"] if m["id"] == "IS-005")
        assert is005["outcome"] == "pass"
        assert is005["score"] == 1.0
        assert "statistics" not in is005 and "value" not in is005

    def test_token_latency_detail(self, full_reports):
        data = json.loads(emit_json(full_reports["fcsp"]))
        llm4 = next(m for m in data["metrics"] if m["id"] == "LLM-004")
        assert set(llm4["detail"]) == {"ttft_ms", "itl_ms"}

    def test_native_parity_is_null(self, full_reports):
        data = json.loads(emit_json(full_reports["native"]))
        assert data["overall"]["unweighted_parity"] is None

    def test_normalizer_only_touches_timestamp(self, full_reports):
        raw = emit_json(full_reports["mig"])
        norm = json.loads(normalize_json_bytes(raw))
        orig = json.loads(raw)
        orig["generated_at"] = norm["generated_at"]
        assert norm == orig


class TestCsv:
    def test_row_count(self, full_reports):
        lines = emit_csv(full_reports["hami"]).decode().splitlines()
        assert len(lines) == 57
        assert lines[0] == ",".join(CSV_HEADER)

    def test_numeric_cells_agree_with_json(self, full_reports):
        report = full_reports["fcsp"]
        data = json.loads(emit_json(report))
        by_id = {m["id"]: m for m in data["metrics"]}
        rows = list(csv.DictReader(io.StringIO(emit_csv(report).decode())))
        for row in rows:
            m = by_id[row["metric_id"]]
            if "statistics" in m:
                for cell, key in (("mean", "mean"), ("stddev", "stddev"), ("median", "median"),
                                  ("p95", "p95"), ("p99", "p99")):
                    assert float(row[cell]) == m["statistics"][key]
                cv = m["statistics"]["cv"]
                assert (row["cv"] == "" and cv is None) or float(row["cv"]) == cv
            elif "value" in m:
                assert float(row["mean"]) == m["value"]
                assert row["stddev"] == ""
            else:
                assert row["mean"] == ""
            assert float(row["score"]) == m["score"]
            assert float(row["mig_expected"]) == m["mig_comparison"]["mig_expected"]
            assert float(row["mig_gap_percent"]) == m["mig_comparison"]["mig_gap_percent"]

    def test_boolean_rows_have_empty_stat_cells(self, full_reports):
        rows = list(csv.DictReader(io.StringIO(emit_csv(full_reports["mig"]).decode())))
        row = next(r for r in rows if r["metric_id"] == "IS-010")
        assert row["mean"] == row["stddev"] == row["cv"] == ""
        assert float(row["score"]) == 1.0


class TestTxt:
    def test_mig_summary_line(self, full_reports):
        text = emit_txt(full_reports["mig"]).decode()
        assert "Overall: 100.0%" in text
        assert "Grade: A+" in text

    def test_fcsp_grade_line(self, full_reports):
        text = emit_txt(full_reports["fcsp"]).decode()
        assert "Grade: B+" in text

    def test_native_parity_dashes(self, full_reports):
        text = emit_txt(full_reports["native"]).decode()
        assert "MIG parity: --" in text

    def test_single_metric_run_shows_one_category(self, catalog):
        report = run_benchmark(RunConfig(system="mig", iterations=1, warmup=0,
                                         metric_filter=["NCCL-001"]), catalog)
        text = emit_txt(report).decode()
        assert "NCCL/P2P" in text
        assert "Isolation" not in text

    def test_worst_five_listed(self, full_reports):
        text = emit_txt(full_reports["hami"]).decode()
        worst = sorted(full_reports["hami"].metrics, key=lambda m: (m.score, m.id))[:5]
        for m in worst:
            assert m.id in text


class TestFiles:
    def test_write_reports_creates_three_files(self, tmp_path, full_reports):
        paths = write_reports(full_reports["mig"], tmp_path / "results" / "mig-42")
        for kind in ("json", "csv", "txt"):
            assert paths[kind].exists()
            assert paths[kind].stat().st_size > 0


class TestGoldenFiles:
    @pytest.mark.parametrize("mode", ALL_MODES)
    def test_normalized_report_matches_golden(self, mode, full_reports, regen_golden):
        golden_path = GOLDEN_DIR / f"{mode}-seed42.json"
        produced = normalize_json_bytes(emit_json(full_reports[mode]))
        if regen_golden:
            GOLDEN_DIR.mkdir(exist_ok=True)
            golden_path.write_bytes(produced)
            pytest.skip("golden regenerated")
        assert golden_path.exists(), f"golden file missing; run pytest --regen-golden"
        assert produced == golden_path.read_bytes()
