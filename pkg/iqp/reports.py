"""Experiment reports: bound checks, JSON and CSV serialization."""
import csv
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import List, Optional

import numpy as np
from django.core.serializers.json import DjangoJSONEncoder

SCHEMA_VERSION = 1


class ReportEncoder(DjangoJSONEncoder):
    """DjangoJSONEncoder that also understands numpy scalars and Fractions."""

    def default(self, o):
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, np.bool_):
            return bool(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, Fraction):
            return str(o)
        return super().default(o)


def format_real(value):
    """Reals get 17 significant digits so they survive a text round trip."""
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return value


@dataclass(frozen=True)
class BoundCheck:
    name: str
    value: float
    bound: float
    slack: float
    relation: str  # "<=" or ">="
    passed: bool

    @classmethod
    def at_most(cls, name, value, bound, slack=0.0):
        return cls(name, float(value), float(bound), float(slack), "<=", bool(value <= bound + slack))

    @classmethod
    def at_least(cls, name, value, bound, slack=0.0):
        return cls(name, float(value), float(bound), float(slack), ">=", bool(value >= bound - slack))

    def __str__(self):
        verdict = "PASS" if self.passed else "FAIL"
        return f"{self.name}: {self.value:.6g} {self.relation} {self.bound:.6g} (slack {self.slack:.3g}) {verdict}"


@dataclass
class ExperimentReport:
    name: str
    config: dict
    trials: List[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    checks: List[BoundCheck] = field(default_factory=list)
    decisions: List[str] = field(default_factory=list)
    wall_clock_s: Optional[float] = None
    headline: Optional[str] = None
    schema: int = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failed_checks(self):
        return [check for check in self.checks if not check.passed]

    def to_dict(self, include_timing=True):
        data = {
            "schema": self.schema,
            "name": self.name,
            "config": self.config,
            "summary": self.summary,
            "checks": [asdict(check) for check in self.checks],
            "passed": self.passed,
            "decisions": list(self.decisions),
            "trials": self.trials,
        }
        if self.headline is not None:
            data["headline"] = self.headline
        if include_timing:
            data["wall_clock_s"] = self.wall_clock_s
        return data

    def to_json(self, include_timing=True):
        return json.dumps(self.to_dict(include_timing), cls=ReportEncoder, indent=2, sort_keys=True)

    def to_text(self):
        lines = [config_line(self.config)]
        if self.headline:
            lines.append(self.headline)
        lines.extend(f"{key}={format_real(value)}" for key, value in sorted(self.summary.items()))
        lines.extend(str(check) for check in self.checks)
        lines.extend(f"decision: {decision}" for decision in self.decisions)
        return "\n".join(lines) + "\n"

    def write_csv(self, stream):
        """The per-trial rows as CSV, headed by the config line."""
        fieldnames = list(self.trials[0]) if self.trials else ["trial"]
        write_rows(stream, self.trials, fieldnames, self.config)


def config_line(config):
    return "# config: " + json.dumps(config, cls=ReportEncoder, sort_keys=True)


def write_rows(stream, rows, fieldnames, config=None):
    if config is not None:
        stream.write(config_line(config) + "\n")
    writer = csv.DictWriter(stream, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: format_real(value) for key, value in row.items()})
