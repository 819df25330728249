from __future__ import annotations

from pathlib import Path

import pytest

from virtbench import load_catalog, run_benchmark
from virtbench.runner import RunConfig

GOLDEN_DIR = Path(__file__).parent / "golden"
ALL_MODES = ("native", "hami", "fcsp", "mig")


def pytest_addoption(parser):
    parser.addoption(
        "--regen-golden",
        action="store_true",
        default=False,
        help="rewrite the golden report files from the current implementation",
    )


@pytest.fixture(scope="session")
def regen_golden(request) -> bool:
    return request.config.getoption("--regen-golden")


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


@pytest.fixture(scope="session")
def full_reports(catalog):
    """One full default-seed run per system mode, shared across the suite."""
    return {mode: run_benchmark(RunConfig(system=mode), catalog) for mode in ALL_MODES}


@pytest.fixture(scope="session")
def metrics_by_id(full_reports):
    return {
        mode: {m.id: m for m in report.metrics}
        for mode, report in full_reports.items()
    }
