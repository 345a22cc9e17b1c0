"""
Seeded instance generators.

Every random draw comes from a counter-based Philox generator keyed by
``(seed, substream)``, so trial ``i`` of an experiment is reproducible
without replaying trials ``0..i-1``. Child substreams are derived with
``numpy.random.SeedSequence``; the derivation is fixed for the lifetime of
stored reports.
"""
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from iqp.core import IsingInstance, Polynomial3
from iqp.exceptions import InvalidParameters

_U64 = 1 << 64

# child labels used inside the generators
LINEAR_PART = 1
BASE_INSTANCE = 2
OBFUSCATION_MASK = 3
ESTIMATOR = 4


@dataclass(frozen=True)
class Seed:
    seed: int = 0
    substream: int = 0

    def __post_init__(self):
        for name in ("seed", "substream"):
            value = getattr(self, name)
            if not 0 <= value < _U64:
                raise InvalidParameters(f"{name} must be a 64-bit unsigned integer, got {value}")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=(self.substream << 64) | self.seed))

    def child(self, *path: int) -> "Seed":
        """A substream that depends only on (seed, substream, path)."""
        state = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.substream, *path))
        return Seed(self.seed, int(state.generate_state(1, dtype=np.uint64)[0]))

    def as_dict(self):
        return {"seed": self.seed, "substream": self.substream}


def gen_xmask(n: int, seed: Seed) -> str:
    """A uniformly random n-bit string."""
    _check_size(n)
    bits = seed.generator().integers(0, 2, size=n)
    return "".join("1" if b else "0" for b in bits)


def gen_poly3(n: int, seed: Seed) -> Polynomial3:
    """Every cubic, quadratic and linear coefficient an independent fair bit.

    The linear part is exactly gen_xmask on the LINEAR_PART child, so a random
    polynomial is a random fixed-linear-part polynomial followed by random X gates.
    """
    _check_size(n)
    rng = seed.generator()
    triples = list(combinations(range(n), 3))
    pairs = list(combinations(range(n), 2))
    cubic_bits = rng.integers(0, 2, size=len(triples))
    quadratic_bits = rng.integers(0, 2, size=len(pairs))
    mask = gen_xmask(n, seed.child(LINEAR_PART))
    return Polynomial3(
        n,
        cubic=tuple(t for t, b in zip(triples, cubic_bits) if b),
        quadratic=tuple(p for p, b in zip(pairs, quadratic_bits) if b),
        linear=tuple(i for i, ch in enumerate(mask) if ch == "1"),
    )


def gen_ising(n: int, seed: Seed, edge_range: int = 8) -> IsingInstance:
    """Vertex weights uniform on {0..7}, edge weights uniform on {0..edge_range-1}, t = 8."""
    _check_size(n)
    if edge_range not in (4, 8):
        raise InvalidParameters(f"edge_range must be 4 or 8, got {edge_range}")
    rng = seed.generator()
    pairs = list(combinations(range(n), 2))
    edges = rng.integers(0, edge_range, size=len(pairs))
    vertices = rng.integers(0, 8, size=n)
    return IsingInstance(
        n,
        edge_weights={pair: int(w) for pair, w in zip(pairs, edges)},
        vertex_weights={k: int(v) for k, v in enumerate(vertices)},
        t=8,
    )


def _check_size(n):
    if n < 1:
        raise InvalidParameters(f"n must be at least 1, got {n}")
