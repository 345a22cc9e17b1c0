"""
Numerical checks of the anticoncentration bounds and the worst-to-average
case pipeline. Every experiment returns an ExperimentReport whose
non-timing fields depend only on its arguments.
"""
import logging
import time
from dataclasses import asdict, dataclass, replace
from fractions import Fraction
from itertools import combinations, product
from typing import Optional

import numpy as np

from iqp.amplitude import amplitude_direct, gap_gray, gap_naive, ising_partition, output_distribution
from iqp.compiler import compile_ising, compile_poly
from iqp.conf import check_limit
from iqp.core import IsingInstance, Polynomial3, apply_xmask
from iqp.exceptions import InvalidParameters
from iqp.parallel import ordered_map
from iqp.reports import BoundCheck, ExperimentReport
from iqp.rng import BASE_INSTANCE, ESTIMATOR, OBFUSCATION_MASK, Seed, gen_ising, gen_poly3, gen_xmask
from iqp.sampling import estimate_prob, model_for_budget, realize

logger = logging.getLogger(__name__)

FAMILIES = ("poly3", "ising")
MOMENT_BOUND = 3
SIGMAS = 3
OBFUSCATION_TOLERANCE = 1e-12

RHO_DECISION = "rho = 1/n instantiates the unspecified 1/poly(n) relative error of the probability estimator"
TARGET_DECISION = "the multiplicative target 1/4 + o(1) is instantiated as 1/4 + rho * (1 + 1/4)"
SIGMA_DECISION = "Monte Carlo checks allow a slack of 3 standard errors"


@dataclass(frozen=True)
class PipelineConfig:
    alpha: float = 0.5
    p: float = 1 / 12
    epsilon: Optional[float] = None  # defaults to alpha * p / 8
    delta: Optional[float] = None  # defaults to p / 2
    rho: Optional[float] = None  # defaults to 1 / n
    trials: int = 100
    seed: Seed = Seed()
    edge_range: int = 8

    def resolved(self, n: int) -> "PipelineConfig":
        cfg = replace(
            self,
            epsilon=self.alpha * self.p / 8 if self.epsilon is None else self.epsilon,
            delta=self.p / 2 if self.delta is None else self.delta,
            rho=1 / n if self.rho is None else self.rho,
        )
        if not 0 < cfg.alpha < 1 or not 0 < cfg.delta < 1 or not 0 < cfg.p <= 1:
            raise InvalidParameters("alpha and delta must lie in (0, 1) and p in (0, 1]")
        if not 0 <= cfg.rho < 1:
            raise InvalidParameters(f"rho must lie in [0, 1), got {cfg.rho}")
        if cfg.trials < 1:
            raise InvalidParameters("at least one trial is needed")
        return cfg

    @property
    def multiplicative_target(self) -> float:
        return 0.25 + self.rho * 1.25

    def as_dict(self):
        data = asdict(self)
        data["seed"] = self.seed.as_dict()
        return data


def _require_family(kind):
    if kind not in FAMILIES:
        raise InvalidParameters(f"unknown instance family {kind!r}")


def _standard_error(values):
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1) / np.sqrt(len(values)))


# --- Anticoncentration ---

def _all_polynomials(n):
    triples = list(combinations(range(n), 3))
    pairs = list(combinations(range(n), 2))
    for bits in product((0, 1), repeat=len(triples) + len(pairs) + n):
        cubic = [t for t, b in zip(triples, bits) if b]
        quadratic = [p for p, b in zip(pairs, bits[len(triples):]) if b]
        linear = [i for i, b in enumerate(bits[len(triples) + len(pairs):]) if b]
        yield Polynomial3(n, tuple(cubic), tuple(quadratic), tuple(linear))


def _all_ising(n, edge_range):
    pairs = list(combinations(range(n), 2))
    for edges in product(range(edge_range), repeat=len(pairs)):
        for vertices in product(range(8), repeat=n):
            yield IsingInstance(n, dict(zip(pairs, edges)), dict(enumerate(vertices)), t=8)


def _exact_scaled_probs(kind, n, edge_range):
    """2**n |<0|C|0>|**2 over the whole instance family; Fractions for poly3."""
    if kind == "poly3":
        check_limit("exact moments", n, "EXACT_MOMENT_MAX_N_POLY3")
        return [Fraction(gap_naive(f) ** 2, 2 ** n) for f in _all_polynomials(n)]
    check_limit("exact moments", n, "EXACT_MOMENT_MAX_N_ISING")
    return [
        abs(ising_partition(inst, mode="exact").value) ** 2 / 2 ** n
        for inst in _all_ising(n, edge_range)
    ]


def _sampled_scaled_prob(job):
    kind, n, seed, edge_range = job
    if kind == "poly3":
        return gap_gray(gen_poly3(n, seed)) ** 2 / 2 ** n
    z = ising_partition(gen_ising(n, seed, edge_range)).value
    return abs(z) ** 2 / 2 ** n


def _scaled_probs(kind, n, mode, trials, seed, edge_range, workers):
    _require_family(kind)
    if mode == "exact":
        return _exact_scaled_probs(kind, n, edge_range), []
    if mode != "monte_carlo":
        raise InvalidParameters(f"unknown mode {mode!r}")
    if trials < 1:
        raise InvalidParameters("at least one trial is needed")
    seeds = [seed.child(BASE_INSTANCE, trial) for trial in range(trials)]
    values = ordered_map(_sampled_scaled_prob, [(kind, n, s, edge_range) for s in seeds], workers)
    rows = [
        {"trial": trial, "substream": s.substream, "scaled_prob": value}
        for trial, (s, value) in enumerate(zip(seeds, values))
    ]
    return values, rows


def _base_config(kind, n, mode, trials, seed, edge_range):
    config = {"kind": kind, "n": n, "mode": mode, "seed": seed.as_dict()}
    if mode == "monte_carlo":
        config["trials"] = trials
    if kind == "ising":
        config["edge_range"] = edge_range
    return config


def moment4(kind, n, mode="exact", trials=10_000, seed=Seed(), edge_range=8, workers=1) -> ExperimentReport:
    """M = 2**(2n) E|<0|C|0>|**4, compared against the fourth-moment bound 3."""
    started = time.perf_counter()
    logger.info("moment4 %s n=%d mode=%s", kind, n, mode)
    values, rows = _scaled_probs(kind, n, mode, trials, seed, edge_range, workers)
    summary = {}
    if mode == "exact" and kind == "poly3":
        exact = sum(v * v for v in values) / len(values)
        summary["M_exact"] = str(exact)
        moment, stderr = float(exact), 0.0
    else:
        squares = np.array([float(v) ** 2 for v in values])
        moment = float(squares.mean())
        stderr = _standard_error(squares) if mode == "monte_carlo" else 0.0
    summary.update(M=moment, stderr=stderr, samples=len(values))
    report = ExperimentReport(
        "moment4",
        _base_config(kind, n, mode, trials, seed, edge_range),
        trials=rows,
        summary=summary,
        checks=[BoundCheck.at_most("fourth_moment", moment, MOMENT_BOUND, SIGMAS * stderr)],
        decisions=[SIGMA_DECISION] if mode == "monte_carlo" else [],
    )
    report.wall_clock_s = time.perf_counter() - started
    return _log_finish(report)


def pz_fraction(kind, n, alpha=0.5, mode="exact", trials=10_000, seed=Seed(), edge_range=8, workers=1) -> ExperimentReport:
    """Fraction of instances with |<0|C|0>|**2 >= alpha * 2**-n, against the Paley-Zygmund bound (1-alpha)**2/3."""
    if not 0 < alpha < 1:
        raise InvalidParameters(f"alpha must lie in (0, 1), got {alpha}")
    started = time.perf_counter()
    logger.info("pz_fraction %s n=%d alpha=%g mode=%s", kind, n, alpha, mode)
    values, rows = _scaled_probs(kind, n, mode, trials, seed, edge_range, workers)
    hits = sum(1 for v in values if v >= alpha)
    summary = {}
    if mode == "exact" and kind == "poly3":
        summary["fraction_exact"] = str(Fraction(hits, len(values)))
    fraction = hits / len(values)
    stderr = np.sqrt(fraction * (1 - fraction) / len(values)) if mode == "monte_carlo" else 0.0
    summary.update(fraction=fraction, stderr=float(stderr), samples=len(values))
    bound = (1 - alpha) ** 2 / MOMENT_BOUND
    config = _base_config(kind, n, mode, trials, seed, edge_range)
    config["alpha"] = alpha
    report = ExperimentReport(
        "pz",
        config,
        trials=rows,
        summary=summary,
        checks=[BoundCheck.at_least("paley_zygmund", fraction, bound, SIGMAS * stderr)],
        decisions=[SIGMA_DECISION] if mode == "monte_carlo" else [],
    )
    report.wall_clock_s = time.perf_counter() - started
    return _log_finish(report)


# --- Exponential-sum counting ---

def lemma9_count(r: int, s: int, n: int) -> int:
    """Number of bit-string quadruples (w, x, y, z) with
    r | w_i w_j + x_i x_j - y_i y_j - z_i z_j for every pair i < j and
    s | w_k + x_k - y_k - z_k for every k.

    Both conditions only compare a key of (w, x) with the same key of (y, z),
    so the count is the sum of squared key multiplicities.
    """
    if r < 2 or s < 2 or (s == 2 and r != 2):
        raise InvalidParameters(f"need r, s >= 2 and r = 2 whenever s = 2, got r={r}, s={s}")
    if n < 1:
        raise InvalidParameters(f"n must be at least 1, got {n}")
    check_limit("lemma9", n, "LEMMA9_MAX_N")
    words = np.arange(1 << n, dtype=np.int64)
    bits = (words[:, None] >> np.arange(n)) & 1
    w = np.repeat(bits, 1 << n, axis=0)
    x = np.tile(bits, (1 << n, 1))
    pairs = list(combinations(range(n), 2))
    columns = [(w[:, i] * w[:, j] + x[:, i] * x[:, j]) % r for i, j in pairs]
    columns += [(w[:, k] + x[:, k]) % s for k in range(n)]
    keys = np.stack(columns, axis=1)
    _, counts = np.unique(keys, axis=0, return_counts=True)
    return int(np.sum(counts.astype(np.int64) ** 2))


def lemma9_sum(r: int, s: int, n: int) -> ExperimentReport:
    started = time.perf_counter()
    count = lemma9_count(r, s, n)
    bound = MOMENT_BOUND * 2 ** (2 * n)
    check = BoundCheck.at_most("quadruple_count", count, bound)
    report = ExperimentReport(
        "lemma9",
        {"r": r, "s": s, "n": n},
        summary={"count": count, "bound": bound},
        checks=[check],
        headline=f"count={count} bound={bound} {'PASS' if check.passed else 'FAIL'}",
    )
    report.wall_clock_s = time.perf_counter() - started
    return _log_finish(report)


# --- Worst-to-average pipeline ---

def _base_instance(family, n, seed, edge_range):
    if family == "poly3":
        f = gen_poly3(n, seed)
        return f, compile_poly(f)
    inst = gen_ising(n, seed, edge_range)
    return inst, compile_ising(inst)


def _obfuscation_ok(family, instance, circuit, y, p_y):
    # the masked circuit's all-zero amplitude is the base circuit's entry y
    masked = amplitude_direct(apply_xmask(circuit, y), "0" * circuit.n)
    if abs(abs(masked.value) ** 2 - p_y) > OBFUSCATION_TOLERANCE:
        return False
    if family == "poly3":
        return masked.exact == gap_gray(instance.with_linear_mask(y))
    return True


def _pipeline_trial(job):
    family, n, model_kind, budget, cfg, trial = job
    base_seed = cfg.seed.child(BASE_INSTANCE, trial)
    instance, circuit = _base_instance(family, n, base_seed, cfg.edge_range)
    y = gen_xmask(n, cfg.seed.child(OBFUSCATION_MASK, trial))
    p = output_distribution(circuit)
    model = model_for_budget(model_kind, circuit, budget, p)
    q = realize(model, p)
    estimate = estimate_prob(model, y, "oracle", cfg.rho, cfg.seed.child(ESTIMATOR, trial), q=q)
    p_y = p[y]
    error = abs(estimate.value - p_y)
    additive_bound = cfg.rho * p_y + cfg.epsilon * (1 + cfg.rho) / (2 ** n * cfg.delta)
    anticoncentrated = p_y >= cfg.alpha / 2 ** n
    return {
        "trial": trial,
        "substream": base_seed.substream,
        "y": y,
        "p": p_y,
        "q": q[y],
        "estimate": estimate.value,
        "abs_err": error,
        "additive_bound": additive_bound,
        "additive_ok": error <= additive_bound,
        "anticoncentrated": anticoncentrated,
        "multiplicative_ok": anticoncentrated and error <= cfg.multiplicative_target * p_y,
        "exact": estimate.value == p_y,
        "obfuscation_ok": _obfuscation_ok(family, instance, circuit, y, p_y),
    }


def pipeline(family, n, model_kind="uniform_mix", budget=None, cfg=PipelineConfig(), workers=1) -> ExperimentReport:
    """Run the obfuscated estimation pipeline on ``cfg.trials`` random instances.

    Each trial draws a base instance and a uniformly random outcome y,
    realizes the sampler model at l1 distance ``budget`` from the base
    circuit's output distribution, and estimates q_y with relative error rho.
    Entry y of that distribution is |<0|C_y|0>|**2 for the circuit with X
    gates appended on y, the worst-case amplitude being hidden.
    """
    _require_family(family)
    cfg = cfg.resolved(n)
    budget = cfg.epsilon if budget is None else budget
    check_limit("pipeline", n, "DISTRIBUTION_MAX_N")
    started = time.perf_counter()
    logger.info("pipeline %s n=%d model=%s budget=%g trials=%d", family, n, model_kind, budget, cfg.trials)

    jobs = [(family, n, model_kind, budget, cfg, trial) for trial in range(cfg.trials)]
    rows = ordered_map(_pipeline_trial, jobs, workers)
    trials = len(rows)

    failure = sum(1 for row in rows if not row["additive_ok"]) / trials
    success = sum(1 for row in rows if row["multiplicative_ok"]) / trials
    anticoncentrated = sum(1 for row in rows if row["anticoncentrated"]) / trials
    exact = sum(1 for row in rows if row["exact"]) / trials
    mismatches = sum(1 for row in rows if not row["obfuscation_ok"])

    half_p = cfg.p / 2
    checks = [
        BoundCheck.at_most("additive_failure", failure, cfg.delta, SIGMAS * np.sqrt(cfg.delta * (1 - cfg.delta) / trials)),
        BoundCheck.at_least("multiplicative_success", success, half_p, SIGMAS * np.sqrt(half_p * (1 - half_p) / trials)),
        BoundCheck.at_most("obfuscation_mismatches", mismatches, 0),
    ]
    config = {"family": family, "n": n, "model": model_kind, "budget": budget, **cfg.as_dict()}
    report = ExperimentReport(
        "pipeline",
        config,
        trials=rows,
        summary={
            "additive_failure": failure,
            "multiplicative_success": success,
            "anticoncentrated": anticoncentrated,
            "exact_fraction": exact,
            "obfuscation_mismatches": mismatches,
            "multiplicative_target": cfg.multiplicative_target,
        },
        checks=checks,
        decisions=[RHO_DECISION, TARGET_DECISION, SIGMA_DECISION],
    )
    report.wall_clock_s = time.perf_counter() - started
    return _log_finish(report)


def _log_finish(report):
    for check in report.failed_checks:
        logger.warning("%s: bound check failed: %s", report.name, check)
    logger.info("%s finished in %.3fs", report.name, report.wall_clock_s or 0.0)
    return report
