from django.contrib import admin

from iqp.models import ExperimentRun


@admin.register(ExperimentRun)
class ExperimentRunAdmin(admin.ModelAdmin):
    list_display = ("id", "name", "seed", "passed", "wall_clock_s", "created_at")
    list_filter = ("name", "passed")
    readonly_fields = ("created_at",)
