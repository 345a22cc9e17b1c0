"""
Sampling from output distributions, l1 distances, synthetic approximate
samplers and the probability estimator that stands in for approximate
counting.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from iqp.amplitude import Distribution, output_distribution
from iqp.core import IqpCircuit, Violation, bits_to_int, int_to_bits
from iqp.exceptions import InvalidInstance, InvalidParameters
from iqp.rng import Seed

logger = logging.getLogger(__name__)

MODEL_KINDS = ("exact", "uniform_mix", "adversarial_shift")
ESTIMATE_MODES = ("oracle", "empirical")
MAX_BUDGET = 2.0


def sample(d: Distribution, shots: int, seed: Seed) -> dict:
    """Draw ``shots`` outcomes by inverse CDF; returns {basis string: count} for outcomes seen."""
    if shots < 0:
        raise InvalidParameters(f"shots must be non-negative, got {shots}")
    cdf = np.cumsum(d.probs)
    cdf[-1] = 1.0
    draws = seed.generator().random(shots)
    indices = np.minimum(np.searchsorted(cdf, draws, side="right"), cdf.size - 1)
    counts = np.bincount(indices, minlength=cdf.size)
    return {int_to_bits(int(i), d.n): int(counts[i]) for i in np.flatnonzero(counts)}


def _check_same_shape(p, q):
    if p.n != q.n or p.probs.shape != q.probs.shape:
        raise InvalidInstance([Violation("q", f"{q.n} qubits do not match {p.n}")])


def l1_distance(p: Distribution, q: Distribution) -> float:
    _check_same_shape(p, q)
    return float(np.sum(np.abs(p.probs - q.probs)))


@dataclass(frozen=True)
class SamplerModel:
    """A hypothetical approximate sampler for ``base``.

    ``parameter`` is the mixing weight for uniform_mix and the l1 budget for
    adversarial_shift; it is ignored for exact.
    """

    kind: str
    base: IqpCircuit
    parameter: float = 0.0

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise InvalidParameters(f"unknown sampler model {self.kind!r}")
        if self.kind == "uniform_mix" and not 0 <= self.parameter <= 1:
            raise InvalidParameters(f"mixing weight must lie in [0, 1], got {self.parameter}")
        if self.kind == "adversarial_shift" and not 0 <= self.parameter <= MAX_BUDGET:
            raise InvalidParameters(f"l1 budget must lie in [0, 2], got {self.parameter}")


def uniform_mix_for_budget(p: Distribution, budget: float) -> float:
    """Mixing weight e' with ||(1-e')p + e'u - p||_1 = budget, i.e. e' = budget / ||u - p||_1."""
    distance = float(np.sum(np.abs(p.probs - 1.0 / p.probs.size)))
    if distance == 0.0:
        if budget:
            raise InvalidParameters("the distribution is uniform; no mixing weight reaches a positive budget")
        return 0.0
    weight = budget / distance
    if weight > 1:
        raise InvalidParameters(f"budget {budget} exceeds the uniform-mix reach {distance}")
    return weight


def model_for_budget(kind: str, base: IqpCircuit, budget: float, p: Optional[Distribution] = None) -> SamplerModel:
    """The model of ``kind`` whose realized distribution sits at l1 distance ``budget`` from p."""
    if kind == "exact":
        return SamplerModel("exact", base)
    if kind == "uniform_mix":
        p = p if p is not None else output_distribution(base)
        return SamplerModel(kind, base, uniform_mix_for_budget(p, budget))
    return SamplerModel(kind, base, budget)


def _adversarial_shift(probs: np.ndarray, budget: float) -> np.ndarray:
    # move budget/2 from the heaviest entries onto the lightest half, or onto
    # the lightest entry alone when the other half holds too little mass;
    # l1 = 2 needs disjoint supports, so it is reachable only when p has a zero
    half = budget / 2
    ascending = np.argsort(probs, kind="stable")
    for count in (max(1, probs.size // 2), 1):
        receivers, donors = ascending[:count], ascending[count:][::-1]
        if float(probs[donors].sum()) >= half * (1 - 1e-12):
            break
    else:
        reachable = 2 * (1 - float(probs[ascending[0]]))
        raise InvalidParameters(f"l1 budget {budget} is out of reach, this distribution allows at most {reachable:.17g}")
    heavy = probs[donors]
    before = np.cumsum(heavy) - heavy
    taken = np.clip(half - before, 0.0, heavy)
    q = probs.copy()
    q[donors] = heavy - taken
    q[receivers] += float(taken.sum()) / receivers.size
    return q


def realize(model: SamplerModel, distribution: Optional[Distribution] = None) -> Distribution:
    """The distribution q the model samples from; ``distribution`` may supply p = output_distribution(base)."""
    p = distribution if distribution is not None else output_distribution(model.base)
    if model.kind == "exact":
        return p
    if model.kind == "uniform_mix":
        weight = model.parameter
        return Distribution(p.n, (1 - weight) * p.probs + weight / p.probs.size)
    logger.debug("adversarial shift of l1 budget %g on %d qubits", model.parameter, p.n)
    return Distribution(p.n, _adversarial_shift(p.probs, model.parameter))


@dataclass(frozen=True)
class ProbEstimate:
    y: str
    value: float
    relative_bound: Optional[float]  # None for empirical estimates
    shots: Optional[int] = None


def estimate_prob(
    model: SamplerModel,
    y: str,
    mode: str = "oracle",
    rel: float = 0.0,
    seed: Seed = Seed(),
    shots: int = 0,
    q: Optional[Distribution] = None,
) -> ProbEstimate:
    """Estimate q_y.

    ``oracle`` reads q_y exactly and multiplies it by 1 + rel*u with u uniform
    on [-1, 1], so |value - q_y| <= rel*q_y always holds. ``empirical`` is the
    frequency of y among ``shots`` samples of q.
    """
    if not 0 <= rel < 1:
        raise InvalidParameters(f"relative error must lie in [0, 1), got {rel}")
    if mode not in ESTIMATE_MODES:
        raise InvalidParameters(f"unknown estimate mode {mode!r}")
    q = q if q is not None else realize(model)
    index = bits_to_int(y)
    if len(y) != q.n:
        raise InvalidInstance([Violation("y", f"length {len(y)} does not match n={q.n}")])
    if mode == "oracle":
        factor = 1 + rel * seed.generator().uniform(-1.0, 1.0)
        return ProbEstimate(y, float(q.probs[index]) * factor, rel)
    if shots < 1:
        raise InvalidParameters("empirical estimates need at least one shot")
    counts = sample(q, shots, seed)
    return ProbEstimate(y, counts.get(y, 0) / shots, None, shots)


def markov_fraction(p: Distribution, q: Distribution, eps: float, delta: float) -> float:
    """Fraction of outcomes y with |p_y - q_y| >= eps / (2**n delta); Markov keeps it at most delta."""
    _check_same_shape(p, q)
    threshold = eps / (p.probs.size * delta)
    return float(np.mean(np.abs(p.probs - q.probs) >= threshold))


def comparison_rows(p: Distribution, q: Distribution, estimates: dict):
    """Per-outcome rows ``y, p, q, estimate, abs_err``; abs_err is measured against p."""
    for y in sorted(estimates, key=bits_to_int):
        estimate = estimates[y].value
        p_y = p[y]
        yield {"y": y, "p": p_y, "q": q[y], "estimate": estimate, "abs_err": abs(estimate - p_y)}
