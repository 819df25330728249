"""Exception hierarchy shared across the package."""

from __future__ import annotations


class VirtBenchError(Exception):
    """Base class for all errors raised by this package."""


class CatalogError(VirtBenchError):
    """Malformed or inconsistent metric catalog data."""


class MetricNotFoundError(CatalogError):
    """Lookup of a metric id that is not in the catalog."""


class CalibrationError(VirtBenchError):
    """Bad calibration file: unknown key, duplicate key, or unparsable value."""


class WeightError(VirtBenchError):
    """Category weights missing, out of range, or not summing to 1."""


class DegenerateInputError(VirtBenchError):
    """Input outside the domain where the formula is defined (e.g. all-zero throughputs)."""


class UndefinedCVError(DegenerateInputError):
    """Coefficient of variation requested for a sample set with non-positive mean."""


class ClockError(VirtBenchError):
    """Virtual time regression."""


class InvalidFreeError(VirtBenchError):
    """Free of an unknown or already-released allocation handle."""


class ConfigError(VirtBenchError):
    """Invalid run configuration (bad metric filter, bad limits, ...)."""


class RunError(VirtBenchError):
    """Benchmark execution failed."""


class CompareError(VirtBenchError):
    """Baseline report missing, unparsable, or schema-incompatible."""
