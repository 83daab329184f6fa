import logging

from celery import shared_task
from django.utils import timezone

from .enums import RunStatus
from .models import BenchRun
from .services import load_dataset, record_benchmark, run_benchmark

logger = logging.getLogger(__name__)


@shared_task(bind=True, acks_late=True)
def run_benchmark_task(self, run_id: int) -> int:
    run = BenchRun.objects.get(pk=run_id)
    run.status = RunStatus.RUNNING
    run.save(update_fields=["status"])
    try:
        report = run_benchmark(
            load_dataset(run.train_path),
            load_dataset(run.test_path),
            algorithms=run.algorithms or None,
            params=run.params,
            seed=run.seed,
        )
    except Exception as exc:
        logger.exception("bench.task_failed run=%s", run_id)
        run.status = RunStatus.FAILED
        run.error = f"{type(exc).__name__}: {exc}"
        run.finished_at = timezone.now()
        run.save(update_fields=["status", "error", "finished_at"])
        return run_id

    record_benchmark(report, run=run)
    return run_id
