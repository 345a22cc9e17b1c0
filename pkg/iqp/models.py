from django.db import models

from iqp.reports import BoundCheck, ExperimentReport, ReportEncoder


class ExperimentRun(models.Model):
    """
    One stored experiment report. Per-trial rows are not kept.
    """
    name = models.CharField(max_length=32, db_index=True)
    schema_version = models.PositiveSmallIntegerField(default=1)
    # 64-bit unsigned seeds do not fit a signed bigint column
    seed = models.CharField(max_length=20, blank=True, default="")
    config = models.JSONField(encoder=ReportEncoder)
    summary = models.JSONField(encoder=ReportEncoder, default=dict)
    checks = models.JSONField(encoder=ReportEncoder, default=list)
    decisions = models.JSONField(default=list)
    passed = models.BooleanField(default=True)
    wall_clock_s = models.FloatField(null=True, blank=True)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ["-created_at", "-id"]

    def __str__(self):
        verdict = "passed" if self.passed else "failed"
        return f"{self.name} #{self.id} ({verdict})"

    @classmethod
    def from_report(cls, report: ExperimentReport):
        data = report.to_dict()
        seed = report.config.get("seed")
        return cls(
            name=report.name,
            schema_version=report.schema,
            seed=str(seed["seed"]) if isinstance(seed, dict) else "",
            config=data["config"],
            summary=data["summary"],
            checks=data["checks"],
            decisions=data["decisions"],
            passed=report.passed,
            wall_clock_s=report.wall_clock_s,
        )

    def to_report(self) -> ExperimentReport:
        return ExperimentReport(
            name=self.name,
            config=self.config,
            summary=self.summary,
            checks=[BoundCheck(**check) for check in self.checks],
            decisions=list(self.decisions),
            wall_clock_s=self.wall_clock_s,
            schema=self.schema_version,
        )
