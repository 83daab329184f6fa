from django.apps import AppConfig


class MimlConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "miml"
    verbose_name = "MIML benchmarks"
