"""
Benchmark report rendering. Text mirrors the familiar results table (one row
per algorithm, five metric columns, three decimals, no timings, so equal
seeds give equal bytes); CSV keeps full precision and the timings.
"""

import csv
import io
import json

from ..enums import ReportFormat
from ..exceptions import DatasetFormatError, InvalidArgument
from ..metrics import METRIC_COLUMNS, METRIC_NAMES, EvalReport
from .benchmark import BenchReport, BenchRow

NAME_HEADING = "Algorithms"
CSV_FIELDS = (
    "algorithm",
    "status",
    *METRIC_NAMES,
    *(f"n_{name}" for name in METRIC_NAMES),
    "seconds",
    "seed",
    "params",
    "error",
)


def _text(report: BenchReport) -> str:
    name_width = max([len(NAME_HEADING)] + [len(r.label) for r in report.rows])
    widths = [max(len(heading), 5) for _, heading in METRIC_COLUMNS]
    lines = [
        " ".join([NAME_HEADING.ljust(name_width)] + [h.rjust(w) for (_, h), w in zip(METRIC_COLUMNS, widths)])
    ]
    for row in report.rows:
        if row.ok:
            cells = [f"{v:.3f}".rjust(w) for v, w in zip(row.report.values(), widths)]
        else:
            cells = ["-".rjust(w) for w in widths]
        lines.append(" ".join([row.label.ljust(name_width)] + cells).rstrip())
    return "\n".join(lines) + "\n"


def _csv(report: BenchReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for row in report.rows:
        if row.ok:
            values = [repr(v) for v in row.report.values()]
            counts = [str(row.report.cases_used.get(name, "")) for name in METRIC_NAMES]
        else:
            values = [""] * len(METRIC_NAMES)
            counts = [""] * len(METRIC_NAMES)
        writer.writerow(
            [
                row.algorithm,
                "ok" if row.ok else "failed",
                *values,
                *counts,
                repr(row.seconds),
                row.seed,
                json.dumps(row.params, sort_keys=True),
                row.error,
            ]
        )
    return buf.getvalue()


def emit_report(report: BenchReport, fmt: str = ReportFormat.TEXT) -> bytes:
    try:
        fmt = ReportFormat(fmt)
    except ValueError:
        raise InvalidArgument(f"report format must be one of {list(ReportFormat.values)}, got {fmt!r}")
    text = _text(report) if fmt == ReportFormat.TEXT else _csv(report)
    return text.encode("utf-8")


def emit_eval_report(report: EvalReport, fmt: str = ReportFormat.TEXT) -> bytes:
    """A single evaluation: one row of the five metrics (text) or metric,value,cases_used (csv)."""
    if fmt == ReportFormat.CSV:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["metric", "value", "cases_used"])
        for name in METRIC_NAMES:
            writer.writerow([name, repr(getattr(report, name)), report.cases_used.get(name, "")])
        return buf.getvalue().encode("utf-8")
    if fmt != ReportFormat.TEXT:
        raise InvalidArgument(f"report format must be one of {list(ReportFormat.values)}, got {fmt!r}")
    widths = [max(len(heading), 5) for _, heading in METRIC_COLUMNS]
    header = " ".join(h.rjust(w) for (_, h), w in zip(METRIC_COLUMNS, widths))
    values = " ".join(f"{v:.3f}".rjust(w) for v, w in zip(report.values(), widths))
    return f"{header}\n{values}\n".encode("utf-8")


def parse_report_csv(data: bytes | str) -> BenchReport:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        return BenchReport()
    missing = set(CSV_FIELDS) - set(reader.fieldnames)
    if missing:
        raise DatasetFormatError(f"report CSV lacks columns {sorted(missing)}")

    rows = []
    seed = 0
    for lineno, raw in enumerate(reader, start=2):
        try:
            report = None
            if raw["status"] == "ok":
                report = EvalReport(
                    **{name: float(raw[name]) for name in METRIC_NAMES},
                    cases_used={name: int(raw[f"n_{name}"]) for name in METRIC_NAMES},
                )
            seed = int(raw["seed"])
            rows.append(
                BenchRow(
                    algorithm=raw["algorithm"],
                    params=json.loads(raw["params"]),
                    seed=seed,
                    report=report,
                    seconds=float(raw["seconds"]),
                    error=raw["error"],
                )
            )
        except (ValueError, KeyError) as exc:
            raise DatasetFormatError(f"report CSV line {lineno}: {exc}") from exc
    return BenchReport(rows=tuple(rows), seed=seed)
