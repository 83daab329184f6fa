from django.db import models
from django.utils import timezone

from .enums import Algorithm, ResultStatus, RunStatus


class BenchRun(models.Model):
    """
    One benchmark invocation: which datasets, which algorithms, which seed.
    """

    seed = models.BigIntegerField(default=0)
    train_path = models.CharField(max_length=500)
    test_path = models.CharField(max_length=500)
    algorithms = models.JSONField(default=list)  # Algorithm values, report order
    params = models.JSONField(default=dict, blank=True)  # algorithm -> {key: value} overrides
    status = models.CharField(max_length=16, choices=RunStatus.choices, default=RunStatus.PENDING)
    error = models.TextField(blank=True)
    created_at = models.DateTimeField(default=timezone.now)
    finished_at = models.DateTimeField(null=True, blank=True)

    class Meta:
        indexes = [models.Index(fields=["status", "created_at"], name="miml_run_status_created_idx")]
        ordering = ["-created_at", "-id"]

    def __str__(self):
        return f"run[{self.pk}] seed={self.seed} {self.status}"


class BenchResult(models.Model):
    """
    One algorithm's row of a run. Metric columns are null for failed rows.
    """

    run = models.ForeignKey(BenchRun, on_delete=models.CASCADE, related_name="results")
    position = models.PositiveSmallIntegerField()  # row order within the report
    algorithm = models.CharField(max_length=16, choices=Algorithm.choices)
    status = models.CharField(max_length=16, choices=ResultStatus.choices)
    params = models.JSONField(default=dict)

    hamming_loss = models.FloatField(null=True, blank=True)
    one_error = models.FloatField(null=True, blank=True)
    ranking_loss = models.FloatField(null=True, blank=True)
    coverage = models.FloatField(null=True, blank=True)
    average_precision = models.FloatField(null=True, blank=True)
    cases_used = models.JSONField(default=dict, blank=True)

    seconds = models.FloatField(default=0.0)
    error = models.TextField(blank=True)

    class Meta:
        ordering = ["run", "position"]
        constraints = [
            models.UniqueConstraint(fields=["run", "algorithm"], name="unique_run_algorithm"),
        ]

    def __str__(self):
        return f"result[{self.pk}] {self.algorithm} {self.status}"
