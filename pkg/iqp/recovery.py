"""
Exact gap recovery from a multiplicative-error amplitude oracle.

Starting from the guess c = 0 the oracle estimates d = |ngap(f) - c|; both
candidates c + d and c - d (snapped to multiples of 2**(1-m)) are queried
and the one with the smaller estimate becomes the next guess. Its estimate
is reused as the next d. An answer of exactly 0 certifies the guess.
"""
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

import numpy as np

from iqp.amplitude import gap_gray
from iqp.core import Polynomial3
from iqp.exceptions import InvalidParameters, RecoveryDidNotConverge
from iqp.parallel import ordered_map
from iqp.reports import BoundCheck, ExperimentReport
from iqp.rng import BASE_INSTANCE, ESTIMATOR, Seed, gen_poly3

logger = logging.getLogger(__name__)

NOISE_MODES = ("zero", "random", "adversarial")
EXACT_ORACLE_CALLS = 3
BRIDGE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class RecoveryConfig:
    epsilon: float
    noise: str = "random"
    grid_m: Optional[int] = None  # defaults to n + 4
    max_iters: Optional[int] = None  # defaults to 64 n
    from_squared: bool = False
    strict: bool = True

    def __post_init__(self):
        if self.noise not in NOISE_MODES:
            raise InvalidParameters(f"unknown noise mode {self.noise!r}")
        if not 0 <= self.epsilon < 1:
            raise InvalidParameters(f"epsilon must lie in [0, 1), got {self.epsilon}")
        if self.strict and self.epsilon >= 0.5:
            raise InvalidParameters(f"recovery needs epsilon < 1/2, got {self.epsilon}")

    def grid_for(self, n):
        m = n + 4 if self.grid_m is None else self.grid_m
        if m < n:
            raise InvalidParameters(f"grid_m must be at least n={n}, got {m}")
        return m

    def iterations_for(self, n):
        return 64 * n if self.max_iters is None else self.max_iters

    def as_dict(self):
        return {
            "epsilon": self.epsilon,
            "noise": self.noise,
            "grid_m": self.grid_m,
            "max_iters": self.max_iters,
            "from_squared": self.from_squared,
            "strict": self.strict,
        }


@dataclass(frozen=True)
class BridgeRecord:
    target: float
    z_tilde: float
    squared_rel_err: float
    abs_rel_err: float
    holds: bool


def square_bridge(z_tilde, f: Optional[Polynomial3] = None, target=None) -> BridgeRecord:
    """Check that a squared estimate within relative error e gives |target| within relative error e.

    ``target`` defaults to ngap(f). The implication holds because
    |a**2 - z**2| = |a - z| (a + z) >= |a - z| a for z >= 0.
    """
    if z_tilde < 0:
        raise InvalidParameters(f"z_tilde must be non-negative, got {z_tilde}")
    if target is None:
        if f is None:
            raise InvalidParameters("square_bridge needs a polynomial or a target value")
        target = gap_gray(f) / 2 ** f.n
    a = abs(float(target))
    z = float(z_tilde)
    if a == 0:
        holds = True
        squared = absolute = 0.0 if z == 0 else float("inf")
    else:
        squared = abs(a * a - z * z) / (a * a)
        absolute = abs(a - z) / a
        holds = absolute <= squared + BRIDGE_TOLERANCE
    return BridgeRecord(a, z, squared, absolute, holds)


@dataclass
class RecoveryResult:
    ngap: Fraction
    gap: int
    iterations: int
    oracle_calls: int
    trace: List[dict] = field(default_factory=list)
    bridge_violations: int = 0


class _NoisyOracle:
    """Answers (1 + gamma) |ngap - c| with |gamma| <= epsilon, and 0 exactly when c = ngap."""

    def __init__(self, truth: Fraction, cfg: RecoveryConfig, seed: Seed):
        self.truth = truth
        self.cfg = cfg
        self.rng = seed.generator()
        self.calls = 0
        self.bridge_violations = 0

    def _gamma(self, sign):
        eps = self.cfg.epsilon
        if self.cfg.noise == "zero":
            return 0.0
        if self.cfg.noise == "random":
            return float(self.rng.uniform(-eps, eps))
        return sign * eps

    def _answer(self, c, sign):
        self.calls += 1
        distance = abs(self.truth - c)
        if distance == 0:
            return Fraction(0)
        gamma = self._gamma(sign)
        if not self.cfg.from_squared:
            return distance * (1 + Fraction(gamma))
        root = float(np.sqrt(float(distance) ** 2 * (1 + gamma)))
        if not square_bridge(root, target=distance).holds:
            self.bridge_violations += 1
        return Fraction(root)

    def estimate(self, c):
        return self._answer(c, +1)

    def compare(self, plus, minus):
        """Estimates for both candidates; the adversary inflates the truly closer one."""
        closer_is_plus = abs(self.truth - plus) <= abs(self.truth - minus)
        return (
            self._answer(plus, +1 if closer_is_plus else -1),
            self._answer(minus, -1 if closer_is_plus else +1),
        )


def _snap(c: Fraction, m: int) -> Fraction:
    scale = 2 ** (m - 1)
    return Fraction(round(c * scale), scale)


def recover_gap(f: Polynomial3, cfg: RecoveryConfig, seed: Seed = Seed()) -> RecoveryResult:
    """Recover the signed ngap(f) exactly from noisy distance estimates."""
    truth = Fraction(gap_gray(f), 2 ** f.n)
    m = cfg.grid_for(f.n)
    max_iters = cfg.iterations_for(f.n)
    oracle = _NoisyOracle(truth, cfg, seed)
    trace = []

    c = Fraction(0)
    d = oracle.estimate(c)
    iterations = 0
    while d != 0:
        if iterations >= max_iters:
            logger.warning("gap recovery stopped after %d iterations at c=%s", iterations, c)
            raise RecoveryDidNotConverge(f"no certified guess after {iterations} iterations", trace)
        iterations += 1
        plus, minus = _snap(c + d, m), _snap(c - d, m)
        d_plus, d_minus = oracle.compare(plus, minus)
        chosen = "+" if d_plus <= d_minus else "-"
        trace.append({
            "iteration": iterations,
            "c": float(c),
            "d": float(d),
            "d_plus": float(d_plus),
            "d_minus": float(d_minus),
            "chosen": chosen,
        })
        c, d = (plus, d_plus) if chosen == "+" else (minus, d_minus)

    return RecoveryResult(
        ngap=c,
        gap=int(c * 2 ** f.n),
        iterations=iterations,
        oracle_calls=oracle.calls,
        trace=trace,
        bridge_violations=oracle.bridge_violations,
    )


def _recovery_run(job):
    n, cfg, seed, run = job
    f = gen_poly3(n, seed.child(BASE_INSTANCE, run))
    expected = gap_gray(f)
    row = {"run": run, "expected_gap": expected}
    try:
        result = recover_gap(f, cfg, seed.child(ESTIMATOR, run))
    except RecoveryDidNotConverge as exc:
        row.update(recovered_gap=None, correct=False, iterations=len(exc.trace), oracle_calls=None, bridge_violations=0)
        return row
    row.update(
        recovered_gap=result.gap,
        correct=result.gap == expected,
        iterations=result.iterations,
        oracle_calls=result.oracle_calls,
        bridge_violations=result.bridge_violations,
    )
    return row


def recovery_experiment(n: int, cfg: RecoveryConfig, runs: int = 100, seed: Seed = Seed(), workers: int = 1) -> ExperimentReport:
    if runs < 1:
        raise InvalidParameters("at least one run is needed")
    started = time.perf_counter()
    logger.info("recover n=%d eps=%g noise=%s runs=%d", n, cfg.epsilon, cfg.noise, runs)
    rows = ordered_map(_recovery_run, [(n, cfg, seed, run) for run in range(runs)], workers)
    converged = [row for row in rows if row["oracle_calls"] is not None]
    correct = sum(1 for row in rows if row["correct"]) / runs
    bridge = sum(row["bridge_violations"] for row in rows)
    max_calls = max((row["oracle_calls"] for row in converged), default=0)
    checks = [
        BoundCheck.at_least("exact_recovery", correct, 1.0),
        BoundCheck.at_most("bridge_violations", bridge, 0),
    ]
    if cfg.noise == "zero":
        checks.append(BoundCheck.at_most("oracle_calls", max_calls, EXACT_ORACLE_CALLS))
    report = ExperimentReport(
        "recover",
        {"n": n, "runs": runs, "seed": seed.as_dict(), **cfg.as_dict()},
        trials=rows,
        summary={
            "recovered": correct,
            "converged": len(converged) / runs,
            "max_iterations": max((row["iterations"] for row in rows), default=0),
            "mean_oracle_calls": float(np.mean([row["oracle_calls"] for row in converged])) if converged else 0.0,
            "max_oracle_calls": max_calls,
            "bridge_violations": bridge,
        },
        checks=checks,
    )
    report.wall_clock_s = time.perf_counter() - started
    for check in report.failed_checks:
        logger.warning("recover: bound check failed: %s", check)
    return report
