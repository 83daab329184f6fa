from django.urls import path

from .views import run_detail, run_list, run_report

app_name = "miml"


urlpatterns = [
    path("runs", run_list, name="run-list"),
    path("runs/<int:run_id>", run_detail, name="run-detail"),
    path("runs/<int:run_id>/report", run_report, name="run-report"),
]
