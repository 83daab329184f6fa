from django.contrib import admin

from .models import BenchResult, BenchRun


class BenchResultInline(admin.TabularInline):
    model = BenchResult
    extra = 0
    can_delete = False
    fields = (
        "position",
        "algorithm",
        "status",
        "hamming_loss",
        "one_error",
        "ranking_loss",
        "coverage",
        "average_precision",
        "seconds",
        "error",
    )
    readonly_fields = fields


@admin.register(BenchRun)
class BenchRunAdmin(admin.ModelAdmin):
    list_display = ("id", "seed", "status", "train_path", "test_path", "created_at", "finished_at")
    list_filter = ("status",)
    search_fields = ("train_path", "test_path")
    inlines = [BenchResultInline]


@admin.register(BenchResult)
class BenchResultAdmin(admin.ModelAdmin):
    def get_queryset(self, request):
        return super().get_queryset(request).select_related("run")

    list_display = ("id", "run", "algorithm", "status", "average_precision", "hamming_loss", "seconds")
    list_filter = ("status", "algorithm")
