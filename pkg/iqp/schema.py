from typing import List, Optional

import strawberry
import strawberry_django
from asgiref.sync import sync_to_async
from strawberry.scalars import JSON

from iqp.evaluation import evaluate_amplitude
from iqp.formats import from_dict
from iqp.models import ExperimentRun


# --- Types ---
@strawberry_django.type(ExperimentRun)
class ExperimentRunType:
    id: int
    name: str
    schema_version: int
    seed: str
    config: JSON
    summary: JSON
    checks: JSON
    decisions: JSON
    passed: bool
    wall_clock_s: Optional[float]
    created_at: str


@strawberry.type
class AmplitudeType:
    n: int
    real: float
    imag: float
    exact: Optional[str]  # "numerator/2^n" when the backend is exact


def _run_type(run: ExperimentRun) -> ExperimentRunType:
    return ExperimentRunType(
        id=run.id,
        name=run.name,
        schema_version=run.schema_version,
        seed=run.seed,
        config=run.config,
        summary=run.summary,
        checks=run.checks,
        decisions=run.decisions,
        passed=run.passed,
        wall_clock_s=run.wall_clock_s,
        created_at=str(run.created_at),
    )


def _amplitude(instance, y, backend, mode):
    value = evaluate_amplitude(from_dict(instance), y, backend, mode=mode)
    return AmplitudeType(n=value.n, real=value.value.real, imag=value.value.imag, exact=value.exact_str())


# --- Queries ---
@strawberry.type
class Query:
    # Stored runs, newest first
    @strawberry.field
    async def experiment_runs(self, name: Optional[str] = None, passed: Optional[bool] = None) -> List[ExperimentRunType]:
        runs = ExperimentRun.objects.all()
        if name is not None:
            runs = runs.filter(name=name)
        if passed is not None:
            runs = runs.filter(passed=passed)
        return [_run_type(run) for run in await sync_to_async(list)(runs)]

    @strawberry.field
    async def experiment_run(self, id: int) -> Optional[ExperimentRunType]:
        try:
            run = await sync_to_async(ExperimentRun.objects.get)(id=id)
        except ExperimentRun.DoesNotExist:
            return None
        return _run_type(run)

    # Evaluate one amplitude of an instance document (poly3, ising, circuit or mixed)
    @strawberry.field
    async def amplitude(
        self, instance: JSON, y: Optional[str] = None, backend: Optional[str] = None, mode: Optional[str] = None,
    ) -> AmplitudeType:
        return await sync_to_async(_amplitude, thread_sensitive=False)(instance, y, backend, mode)


schema = strawberry.Schema(query=Query)
