"""Telemetry CSV and run-summary JSON writers (UTF-8, LF line endings)."""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path
from typing import Any

from .recorder import BROODING, IterationRecord, RunTelemetry

log = logging.getLogger(__name__)

_PER_SOURCE = ("produced", "settled", "best")


def format_number(value: float | int) -> str:
    """Integers verbatim, floats with 9 significant digits."""
    if isinstance(value, (bool, int)):
        return str(int(value))
    return format(float(value), ".9g")


def csv_header(substrate_names: list[str]) -> list[str]:
    header = ["iteration", "best_fitness"]
    for name in substrate_names:
        header += [f"{prefix}_{name}" for prefix in _PER_SOURCE]
    header += [f"produced_{BROODING}", f"settled_{BROODING}"]
    return header


def _row(record: IterationRecord, n_substrates: int) -> list[str]:
    row = [format_number(record.iteration), format_number(record.best_fitness)]
    for k in range(n_substrates):
        row += [
            format_number(record.produced[k]),
            format_number(record.settled[k]),
            "1" if record.best_substrate == k else "0",
        ]
    row += [format_number(record.produced[n_substrates]), format_number(record.settled[n_substrates])]
    return row


def write_csv(telemetry: RunTelemetry, path: str | Path) -> Path:
    """Write one row per iteration.

    Raises
    ------
    OSError:
        If *path* cannot be written.
    """
    path = Path(path)
    n_sub = len(telemetry.substrate_names)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(csv_header(telemetry.substrate_names))
        for record in telemetry.records:
            writer.writerow(_row(record, n_sub))
    log.debug("Telemetry written to %s (%d rows)", path, len(telemetry.records))
    return path


def read_csv(path: str | Path) -> RunTelemetry:
    """Parse a file produced by :func:`write_csv` back into records."""
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration as exc:
            raise ValueError(f"{path}: empty telemetry file") from exc
        names = [col[len("best_"):] for col in header if col.startswith("best_") and col != "best_fitness"]
        if header != csv_header(names):
            raise ValueError(f"{path}: unexpected telemetry header {header}")

        telemetry = RunTelemetry(substrate_names=names)
        n_sub = len(names)
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ValueError(f"{path}:{line_no}: expected {len(header)} columns, got {len(row)}")
            cells = iter(row[2:])
            produced, settled, best = [], [], None
            for k in range(n_sub):
                produced.append(int(next(cells)))
                settled.append(int(next(cells)))
                if next(cells) == "1":
                    best = k
            produced.append(int(next(cells)))
            settled.append(int(next(cells)))
            telemetry.records.append(
                IterationRecord(
                    iteration=int(row[0]),
                    best_fitness=float(row[1]),
                    produced=tuple(produced),
                    settled=tuple(settled),
                    best_substrate=best,
                )
            )
    return telemetry


def summary_dict(
    telemetry: RunTelemetry,
    best_fitness: float | None,
    best_genome: list[float],
    extra: dict[str, Any] | None = None,
) -> dict[str, Any]:
    summary: dict[str, Any] = {
        "best_fitness": best_fitness,
        "best_genome": best_genome,
        "evaluations": telemetry.evaluations,
        "seconds": round(telemetry.seconds, 3),
        "seed": telemetry.seed,
        "generator": telemetry.generator,
        "params_digest": telemetry.params_digest,
        "iterations": len(telemetry.records),
    }
    if extra:
        summary.update(extra)
    return summary


def write_summary(summary: dict[str, Any], path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    log.debug("Summary written to %s", path)
    return path
