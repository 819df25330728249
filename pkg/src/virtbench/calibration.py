"""Calibration file loading.

The format is line-oriented ``key = value`` text (UTF-8, ``#`` comments).
Recognized key shapes:

    <METRIC-ID>.mig_expected          baseline value used for scoring
    <METRIC-ID>.<backend>.target      published reference value for one backend
    weights.<category>                category weight override
    sim.<mode>.<param>                backend simulation parameter

Backends/modes are ``native``, ``hami``, ``fcsp``, ``mig``. Unknown keys,
unknown metric ids, and duplicate keys within one file are errors. Values
loaded later override earlier ones, which is how a user file layers on top of
the shipped defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import CalibrationError

MODES = ("native", "hami", "fcsp", "mig")

CATEGORY_SLUGS = (
    "overhead",
    "isolation",
    "llm",
    "bandwidth",
    "cache",
    "pcie",
    "nccl",
    "scheduling",
    "fragmentation",
    "error_recovery",
)

_DEFAULT_RESOURCE = "default_calibration.cal"


@dataclass
class CalibrationData:
    """Parsed calibration values, merged across the default and user files."""

    baselines: dict[str, float] = field(default_factory=dict)
    targets: dict[tuple[str, str], float] = field(default_factory=dict)
    weights: dict[str, float] = field(default_factory=dict)
    sim_params: dict[str, dict[str, float]] = field(default_factory=dict)

    def sim(self, mode: str) -> dict[str, float]:
        if mode not in MODES:
            raise CalibrationError(f"unknown mode {mode!r}; expected one of {MODES}")
        return dict(self.sim_params.get(mode, {}))


def _parse_value(key: str, raw: str, lineno: int) -> float:
    try:
        return float(raw)
    except ValueError:
        raise CalibrationError(f"line {lineno}: value for {key!r} is not a number: {raw!r}") from None


def _apply_line(data: CalibrationData, key: str, value: float, *, lineno: int, valid_ids: frozenset[str]) -> None:
    parts = key.split(".")
    if len(parts) == 2 and parts[0] == "weights":
        slug = parts[1]
        if slug not in CATEGORY_SLUGS:
            raise CalibrationError(f"line {lineno}: unknown category in key {key!r}")
        data.weights[slug] = value
        return
    if len(parts) == 3 and parts[0] == "sim":
        mode = parts[1]
        if mode not in MODES:
            raise CalibrationError(f"line {lineno}: unknown mode in key {key!r}")
        data.sim_params.setdefault(mode, {})[parts[2]] = value
        return
    if len(parts) == 2 and parts[1] == "mig_expected":
        metric_id = parts[0]
        if metric_id not in valid_ids:
            raise CalibrationError(f"line {lineno}: unknown metric id {metric_id!r}")
        data.baselines[metric_id] = value
        return
    if len(parts) == 3 and parts[2] == "target":
        metric_id, backend = parts[0], parts[1]
        if metric_id not in valid_ids:
            raise CalibrationError(f"line {lineno}: unknown metric id {metric_id!r}")
        if backend not in MODES:
            raise CalibrationError(f"line {lineno}: unknown backend in key {key!r}")
        data.targets[(metric_id, backend)] = value
        return
    raise CalibrationError(f"line {lineno}: unrecognized key {key!r}")


def parse_calibration_text(text: str, *, valid_ids: frozenset[str], into: CalibrationData | None = None) -> CalibrationData:
    """Parse one calibration document, layering onto ``into`` when given."""
    data = into if into is not None else CalibrationData()
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise CalibrationError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key in seen:
            raise CalibrationError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)
        _apply_line(data, key, _parse_value(key, raw, lineno), lineno=lineno, valid_ids=valid_ids)
    return data


def default_calibration_text() -> str:
    return resources.files("virtbench.data").joinpath(_DEFAULT_RESOURCE).read_text(encoding="utf-8")


def load_calibration(path: str | Path | None, *, valid_ids: frozenset[str]) -> CalibrationData:
    """Load shipped defaults, then overlay the optional user file."""
    data = parse_calibration_text(default_calibration_text(), valid_ids=valid_ids)
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        parse_calibration_text(text, valid_ids=valid_ids, into=data)
    return data
