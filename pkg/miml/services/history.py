import logging
from typing import Optional

from django.db import transaction
from django.utils import timezone

from ..enums import ResultStatus, RunStatus
from ..metrics import METRIC_NAMES, EvalReport
from ..models import BenchResult, BenchRun
from .benchmark import BenchReport, BenchRow

logger = logging.getLogger(__name__)


def record_benchmark(
    report: BenchReport,
    train_path: str = "",
    test_path: str = "",
    run: Optional[BenchRun] = None,
) -> BenchRun:
    """Store a finished report; fills `run` when one was created up front (queued runs)."""
    with transaction.atomic():
        if run is None:
            run = BenchRun.objects.create(
                seed=report.seed,
                train_path=str(train_path),
                test_path=str(test_path),
                algorithms=[r.algorithm for r in report.rows],
            )
        else:
            run.results.all().delete()

        BenchResult.objects.bulk_create(
            [_result_from_row(run, position, row) for position, row in enumerate(report.rows)]
        )
        run.status = RunStatus.DONE
        run.finished_at = timezone.now()
        run.error = ""
        run.save(update_fields=["status", "finished_at", "error"])

    logger.info("bench.recorded run=%s rows=%s", run.pk, len(report.rows))
    return run


def _result_from_row(run: BenchRun, position: int, row: BenchRow) -> BenchResult:
    metrics = {name: getattr(row.report, name) for name in METRIC_NAMES} if row.ok else {}
    return BenchResult(
        run=run,
        position=position,
        algorithm=row.algorithm,
        status=ResultStatus.OK if row.ok else ResultStatus.FAILED,
        params=row.params,
        cases_used=dict(row.report.cases_used) if row.ok else {},
        seconds=row.seconds,
        error=row.error,
        **metrics,
    )


def report_from_run(run: BenchRun) -> BenchReport:
    rows = []
    for result in run.results.order_by("position"):
        report = None
        if result.status == ResultStatus.OK:
            report = EvalReport(
                **{name: getattr(result, name) for name in METRIC_NAMES},
                cases_used=dict(result.cases_used),
            )
        rows.append(
            BenchRow(
                algorithm=result.algorithm,
                params=result.params,
                seed=run.seed,
                report=report,
                seconds=result.seconds,
                error=result.error,
            )
        )
    return BenchReport(rows=tuple(rows), seed=run.seed)
