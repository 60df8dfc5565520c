"""Run telemetry: per-iteration counters, smoothing and file export."""

from __future__ import annotations

from .export import csv_header, read_csv, summary_dict, write_csv, write_summary
from .recorder import (
    BROODING,
    DEFAULT_RATIO_WINDOW,
    IterationEvents,
    IterationRecord,
    LarvaEvent,
    RunTelemetry,
    best_larva_ratio,
)

__all__ = [
    "BROODING",
    "DEFAULT_RATIO_WINDOW",
    "IterationEvents",
    "IterationRecord",
    "LarvaEvent",
    "RunTelemetry",
    "best_larva_ratio",
    "csv_header",
    "read_csv",
    "summary_dict",
    "write_csv",
    "write_summary",
]
