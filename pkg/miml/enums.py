from django.db.models import TextChoices
from django.utils.translation import gettext_lazy as _


class Algorithm(TextChoices):
    # member order is the fixed row order of every report
    MIMLKNN = "mimlknn", _("MIML-kNN")
    MIMLRBF = "mimlrbf", _("MIMLRBF")
    MIMLSVM = "mimlsvm", _("MIMLSVM")
    MIMLBOOST = "mimlboost", _("MIMLBOOST")
    M3MIML = "m3miml", _("M3MIML")
    KISAR = "kisar", _("KISAR")


class BagDistance(TextChoices):
    AVERAGE = "average", _("Average Hausdorff")
    MAXIMUM = "max", _("Max Hausdorff")


class ReportFormat(TextChoices):
    TEXT = "text", _("Text")
    CSV = "csv", _("CSV")


class RunStatus(TextChoices):
    PENDING = "pending", _("Pending")  # recorded, not yet picked up
    RUNNING = "running", _("Running")
    DONE = "done", _("Done")
    FAILED = "failed", _("Failed")  # the harness itself aborted


class ResultStatus(TextChoices):
    OK = "ok", _("OK")
    FAILED = "failed", _("Failed")  # this algorithm raised, others may be fine


class ViolationRule(TextChoices):
    MANIFEST = "manifest", _("Manifest")
    DIMENSION = "dimension", _("Dimension")
    VOCABULARY = "vocabulary", _("Vocabulary")
    DUPLICATE_ID = "duplicate-case-id", _("Duplicate case id")
