from __future__ import annotations

import json
import os

import pytest

from virtbench.cli import main, parse_args, UsageError
from virtbench.reporting import normalize_json_bytes


class TestParsing:
    def test_basic_flags(self):
        args = parse_args(["--system", "native", "--iterations", "200"])
        assert args.system == "native"
        assert args.iterations == 200
        assert args.warmup == 10

    def test_resource_limit_flags(self):
        args = parse_args(["--system", "hami", "--memory-limit", "2048",
                           "--compute-limit", "30", "--processes", "4"])
        assert args.memory_limit == 2048
        assert args.compute_limit == 30.0
        assert args.processes == 4

    def test_metric_list_flag(self):
        args = parse_args(["--system", "fcsp", "--metrics", "LLM-001,LLM-002,LLM-003,LLM-004"])
        assert args.metrics == "LLM-001,LLM-002,LLM-003,LLM-004"

    def test_bogus_system_rejected(self):
        with pytest.raises(UsageError, match="native"):
            parse_args(["--system", "bogus"])

    def test_unknown_flag_rejected(self):
        with pytest.raises(UsageError):
            parse_args(["--system", "native", "--turbo"])

    def test_system_required(self):
        with pytest.raises(UsageError):
            parse_args(["--iterations", "5"])


class TestMain:
    def run(self, tmp_path, *argv: str) -> int:
        cwd = os.getcwd()
        os.chdir(tmp_path)
        try:
            return main(list(argv))
        finally:
            os.chdir(cwd)

    def test_happy_path_writes_three_files(self, tmp_path, capsys):
        rc = self.run(tmp_path, "--system", "mig", "--metrics", "OH-001,ERR-003",
                      "--iterations", "5", "--warmup", "1")
        assert rc == 0
        out = capsys.readouterr().out
        assert "grade" in out
        for ext in ("json", "csv", "txt"):
            assert (tmp_path / "results" / f"mig-42.{ext}").exists()

    def test_usage_error_exit_code(self, capsys):
        assert main(["--system", "bogus"]) == 1
        assert "usage error" in capsys.readouterr().err

    def test_invalid_metric_id_named(self, capsys):
        rc = main(["--system", "mig", "--metrics", "OH-999,OH-001"])
        assert rc == 1
        assert "OH-999" in capsys.readouterr().err

    def test_missing_compare_baseline_exit_2(self, tmp_path, capsys):
        rc = self.run(tmp_path, "--system", "fcsp", "--metrics", "OH-001",
                      "--compare", "missing.json")
        assert rc == 2
        assert "missing.json" in capsys.readouterr().err

    def test_compare_against_own_output(self, tmp_path, capsys):
        rc = self.run(tmp_path, "--system", "fcsp", "--metrics", "OH-001",
                      "--iterations", "5", "--output", "base")
        assert rc == 0
        rc = self.run(tmp_path, "--system", "fcsp", "--metrics", "OH-001",
                      "--iterations", "5", "--compare", "base.json", "--output", "again")
        assert rc == 0
        assert "No regressions" in capsys.readouterr().out

    def test_repeated_runs_identical_modulo_timestamp(self, tmp_path):
        self.run(tmp_path, "--system", "hami", "--metrics", "OH-001", "--seed", "7",
                 "--output", "a")
        self.run(tmp_path, "--system", "hami", "--metrics", "OH-001", "--seed", "7",
                 "--output", "b")
        a = normalize_json_bytes((tmp_path / "a.json").read_bytes())
        b = normalize_json_bytes((tmp_path / "b.json").read_bytes())
        assert a == b

    def test_calibration_env_fallback(self, tmp_path, monkeypatch):
        cal = tmp_path / "override.cal"
        cal.write_text("OH-001.mig_expected = 9.0\n")
        monkeypatch.setenv("VIRTBENCH_CALIBRATION", str(cal))
        rc = self.run(tmp_path, "--system", "mig", "--metrics", "OH-001",
                      "--iterations", "2", "--warmup", "0", "--output", "env-cal")
        assert rc == 0
        data = json.loads((tmp_path / "env-cal.json").read_text())
        assert data["metrics"][0]["mig_comparison"]["mig_expected"] == 9.0

    def test_calibration_flag_beats_env(self, tmp_path, monkeypatch):
        good = tmp_path / "good.cal"
        good.write_text("OH-001.mig_expected = 8.0\n")
        bad = tmp_path / "bad.cal"
        bad.write_text("definitely not = parseable junk\n")
        monkeypatch.setenv("VIRTBENCH_CALIBRATION", str(bad))
        rc = self.run(tmp_path, "--system", "mig", "--metrics", "OH-001",
                      "--iterations", "2", "--warmup", "0",
                      "--calibration", str(good), "--output", "flag-cal")
        assert rc == 0
