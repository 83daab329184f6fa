from django.http import HttpResponse, JsonResponse
from django.shortcuts import get_object_or_404
from django.views.decorators.http import require_GET

from .enums import ReportFormat
from .metrics import METRIC_NAMES
from .models import BenchRun
from .services import emit_report, report_from_run

RUNS_PAGE = 50


def _run_summary(run: BenchRun) -> dict:
    return {
        "id": run.pk,
        "seed": run.seed,
        "status": run.status,
        "train_path": run.train_path,
        "test_path": run.test_path,
        "algorithms": run.algorithms,
        "created_at": run.created_at.isoformat(),
        "finished_at": run.finished_at.isoformat() if run.finished_at else None,
        "error": run.error,
    }


@require_GET
def run_list(request) -> JsonResponse:
    runs = BenchRun.objects.all()[:RUNS_PAGE]
    return JsonResponse({"runs": [_run_summary(r) for r in runs]})


@require_GET
def run_detail(request, run_id: int) -> JsonResponse:
    run = get_object_or_404(BenchRun, pk=run_id)
    rows = [
        {
            "algorithm": r.algorithm,
            "status": r.status,
            "params": r.params,
            "metrics": {name: getattr(r, name) for name in METRIC_NAMES},
            "cases_used": r.cases_used,
            "seconds": r.seconds,
            "error": r.error,
        }
        for r in run.results.order_by("position")
    ]
    return JsonResponse({**_run_summary(run), "results": rows})


@require_GET
def run_report(request, run_id: int) -> HttpResponse:
    run = get_object_or_404(BenchRun, pk=run_id)
    fmt = request.GET.get("format", ReportFormat.TEXT)
    if fmt not in ReportFormat.values:
        return JsonResponse({"detail": f"format must be one of {list(ReportFormat.values)}"}, status=400)
    content_type = "text/csv" if fmt == ReportFormat.CSV else "text/plain"
    return HttpResponse(
        emit_report(report_from_run(run), fmt), content_type=f"{content_type}; charset=utf-8"
    )
