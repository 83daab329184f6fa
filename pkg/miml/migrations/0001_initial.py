# Generated by Django 5.2.6 on 2026-10-18 09:12

import django.db.models.deletion
import django.utils.timezone
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="BenchRun",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                ("seed", models.BigIntegerField(default=0)),
                ("train_path", models.CharField(max_length=500)),
                ("test_path", models.CharField(max_length=500)),
                ("algorithms", models.JSONField(default=list)),
                ("params", models.JSONField(blank=True, default=dict)),
                (
                    "status",
                    models.CharField(
                        choices=[
                            ("pending", "Pending"),
                            ("running", "Running"),
                            ("done", "Done"),
                            ("failed", "Failed"),
                        ],
                        default="pending",
                        max_length=16,
                    ),
                ),
                ("error", models.TextField(blank=True)),
                ("created_at", models.DateTimeField(default=django.utils.timezone.now)),
                ("finished_at", models.DateTimeField(blank=True, null=True)),
            ],
            options={
                "ordering": ["-created_at", "-id"],
                "indexes": [
                    models.Index(
                        fields=["status", "created_at"],
                        name="miml_run_status_created_idx",
                    )
                ],
            },
        ),
        migrations.CreateModel(
            name="BenchResult",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                ("position", models.PositiveSmallIntegerField()),
                (
                    "algorithm",
                    models.CharField(
                        choices=[
                            ("mimlknn", "MIML-kNN"),
                            ("mimlrbf", "MIMLRBF"),
                            ("mimlsvm", "MIMLSVM"),
                            ("mimlboost", "MIMLBOOST"),
                            ("m3miml", "M3MIML"),
                            ("kisar", "KISAR"),
                        ],
                        max_length=16,
                    ),
                ),
                (
                    "status",
                    models.CharField(
                        choices=[("ok", "OK"), ("failed", "Failed")],
                        max_length=16,
                    ),
                ),
                ("params", models.JSONField(default=dict)),
                ("hamming_loss", models.FloatField(blank=True, null=True)),
                ("one_error", models.FloatField(blank=True, null=True)),
                ("ranking_loss", models.FloatField(blank=True, null=True)),
                ("coverage", models.FloatField(blank=True, null=True)),
                ("average_precision", models.FloatField(blank=True, null=True)),
                ("cases_used", models.JSONField(blank=True, default=dict)),
                ("seconds", models.FloatField(default=0.0)),
                ("error", models.TextField(blank=True)),
                (
                    "run",
                    models.ForeignKey(
                        on_delete=django.db.models.deletion.CASCADE,
                        related_name="results",
                        to="miml.benchrun",
                    ),
                ),
            ],
            options={
                "ordering": ["run", "position"],
                "constraints": [
                    models.UniqueConstraint(
                        fields=("run", "algorithm"), name="unique_run_algorithm"
                    )
                ],
            },
        ),
    ]
