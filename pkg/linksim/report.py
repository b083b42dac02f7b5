"""
Report emission: per-flow CSV and a JSON summary, written atomically.
"""

import csv
import io
import logging
from pathlib import Path
from typing import Literal, Sequence, Union

from linksim.errors import ReportWriteError
from linksim.models import Report, SweepEntry, SweepSummary

logger = logging.getLogger(__name__)

ReportFormat = Literal["csv", "json", "both"]

CSV_HEADER = (
    "flow_id",
    "frames_generated",
    "frames_delivered",
    "frames_dropped",
    "bytes_delivered",
    "throughput_bps",
    "mean_delay_ns",
)


def render_csv(report: Report) -> str:
    """One row per flow, flow_id ascending, '.' as decimal separator."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for flow in sorted(report.flows, key=lambda f: f.flow_id):
        writer.writerow(
            (
                flow.flow_id,
                flow.frames_generated,
                flow.frames_delivered,
                flow.frames_dropped,
                flow.bytes_delivered,
                f"{flow.throughput_bps:.3f}",
                f"{flow.mean_delay_ns:.3f}",
            )
        )
    return buffer.getvalue()


def render_summary(report: Union[Report, SweepSummary]) -> str:
    return report.model_dump_json(indent=2) + "\n"


def _write_atomic(path: Path, text: str) -> None:
    """Write through a temporary file and rename over the target."""
    temp_file = path.with_suffix(path.suffix + ".tmp")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(temp_file, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        temp_file.replace(path)
    except OSError as e:
        raise ReportWriteError(path, e.strerror or str(e)) from e


def report_stem(report: Report, prefix: str) -> str:
    return f"{prefix}-seed{report.seed}"


def emit_report(
    report: Report,
    directory: Union[str, Path],
    prefix: str,
    fmt: ReportFormat = "both",
) -> list[Path]:
    """
    Write the report as CSV and/or JSON summary.

    Returns:
        Paths written, CSV first
    """
    directory = Path(directory)
    stem = report_stem(report, prefix)
    written = []
    if fmt in ("csv", "both"):
        path = directory / f"{stem}.csv"
        _write_atomic(path, render_csv(report))
        written.append(path)
    if fmt in ("json", "both"):
        path = directory / f"{stem}-summary.json"
        _write_atomic(path, render_summary(report))
        written.append(path)
    for path in written:
        logger.info("wrote %s", path)
    return written


def summarize_sweep(reports: Sequence[Report], prefix: str) -> SweepSummary:
    first = reports[0]
    runs = [
        SweepEntry(
            seed=r.seed,
            aggregate_throughput_bps=r.aggregate_throughput_bps,
            jain_index=r.jain_index,
            max_min_ratio=r.max_min_ratio,
            csv_file=f"{report_stem(r, prefix)}.csv",
        )
        for r in reports
    ]
    # Runs with no deliveries have no index and are left out
    indices = [r.jain_index for r in reports if r.jain_index is not None]
    return SweepSummary(
        scenario=first.scenario,
        duration_s=first.duration_s,
        link=first.link,
        scheduler=first.scheduler,
        runs=runs,
        mean_jain_index=sum(indices) / len(indices) if indices else None,
        min_jain_index=min(indices) if indices else None,
    )


def emit_sweep(
    reports: Sequence[Report],
    directory: Union[str, Path],
    prefix: str,
) -> list[Path]:
    """One CSV per seed plus a combined summary."""
    directory = Path(directory)
    written = []
    # Per-seed CSVs first, the combined summary last
    for report in reports:
        written.extend(emit_report(report, directory, prefix, fmt="csv"))
    path = directory / f"{prefix}-sweep.json"
    _write_atomic(path, render_summary(summarize_sweep(reports, prefix)))
    logger.info("wrote %s", path)
    written.append(path)
    return written
