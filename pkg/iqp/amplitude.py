"""
Amplitude backends.

* ``gap_naive`` / ``gap_gray``: gap(f) of a degree-3 polynomial by direct
  enumeration, and by Gray-code enumeration with bit-parallel lanes.
* ``ising_partition``: Z(omega) of a complete-graph Ising instance.
* ``amplitude_direct``: <y|C|0> of an IQP circuit as an exact cyclotomic sum.
* ``amplitude_statevector`` / ``output_distribution``: full state simulation,
  used as the independent oracle.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Optional, Union

import numpy as np

from iqp.conf import check_limit, iqp_setting
from iqp.core import (
    EIGHTHS, Hadamard, IqpCircuit, IsingInstance, MixedCircuit, Polynomial3, Violation,
    bits_to_int, diagonal_eighths, require_valid,
)
from iqp.cyclotomic import Cyclotomic16
from iqp.exceptions import InvalidInstance, InvalidParameters, UnsupportedOrder
from iqp.parallel import ordered_map

logger = logging.getLogger(__name__)

_BLOCK_BITS = 20
EXACT_ORDERS = (1, 2, 4, 8)


@dataclass(frozen=True)
class AmplitudeValue:
    """An amplitude ``exact / 2**n`` with its floating evaluation ``value``.

    ``exact`` is an int when the sum is rational (a gap), a Cyclotomic16
    otherwise, and None for float-only results.
    """

    exact: Union[int, Cyclotomic16, None]
    value: complex
    n: int

    @classmethod
    def from_cyclotomic(cls, z: Cyclotomic16, n: int) -> "AmplitudeValue":
        exact = z.coeffs[0] if z.is_rational else z
        return cls(exact, z.value / 2 ** n, n)

    def exact_str(self) -> Optional[str]:
        if self.exact is None:
            return None
        return f"{self.exact}/{2 ** self.n}"


@dataclass(frozen=True, eq=False)
class Distribution:
    n: int
    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=np.float64)
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    def __getitem__(self, y: str) -> float:
        return float(self.probs[bits_to_int(y)])

    def violations(self):
        found = []
        if self.probs.shape != (1 << self.n,):
            found.append(Violation("probs", f"expected {1 << self.n} entries, got {self.probs.size}"))
        if (self.probs < 0).any():
            found.append(Violation("probs", "negative entry"))
        if abs(float(self.probs.sum()) - 1.0) > 1e-9:
            found.append(Violation("probs", "does not sum to 1"))
        return found


def _blocks(n, block_bits=_BLOCK_BITS):
    size = 1 << min(n, block_bits)
    for start in range(0, 1 << n, size):
        yield start, size


def _check_basis_string(y: str, n: int):
    if len(y) != n:
        raise InvalidInstance([Violation("y", f"length {len(y)} does not match n={n}")])
    return bits_to_int(y)


# --- Polynomial gaps ---

def gap_naive(f: Polynomial3) -> int:
    """|{x: f(x)=0}| - |{x: f(x)=1}| by evaluating f on every input."""
    require_valid(f)
    check_limit("gap_naive", f.n, "GAP_MAX_N")
    total = 0
    for start, size in _blocks(f.n):
        xs = np.arange(start, start + size, dtype=np.int64)
        bits = [((xs >> i) & 1).astype(np.uint8) for i in range(f.n)]
        values = np.zeros(size, dtype=np.uint8)
        for mono in f.monomials():
            term = bits[mono[0]].copy()
            for i in mono[1:]:
                term &= bits[i]
            values ^= term
        total += size - 2 * int(values.sum(dtype=np.int64))
    return total


@lru_cache(maxsize=None)
def _lane_masks(lane_bits):
    """Word whose bit l is bit v of the lane index l, for each lane variable v."""
    lanes = np.arange(1 << lane_bits, dtype=np.int64)
    return tuple(
        int.from_bytes(np.packbits(((lanes >> v) & 1).astype(np.uint8), bitorder="little").tobytes(), "little")
        for v in range(lane_bits)
    )


def _and_words(word, variables, ones):
    result = ones
    for v in variables:
        result &= word[v]
    return result


def _gray_segment(job):
    f, lane_bits, split, segment = job
    n = f.n
    lanes = 1 << lane_bits
    ones = (1 << lanes) - 1
    gray_vars = list(range(lane_bits, n - split))
    pos = {v: k for k, v in enumerate(gray_vars)}
    g = len(gray_vars)

    word = dict(enumerate(_lane_masks(lane_bits)))
    word.update((v, 0) for v in gray_vars)
    for k in range(split):
        word[n - split + k] = ones if (segment >> k) & 1 else 0

    # F is f on every lane; first[k] = df/dx_k; second[a][b] = d2f/dx_a dx_b
    value = 0
    first = [0] * g
    second = [[0] * g for _ in range(g)]
    cubic_pairs = [[] for _ in range(g)]
    for mono in f.monomials():
        value ^= _and_words(word, mono, ones)
        mobile = [v for v in mono if v in pos]
        for v in mobile:
            first[pos[v]] ^= _and_words(word, [u for u in mono if u != v], ones)
        for a, b in combinations(mobile, 2):
            term = _and_words(word, [u for u in mono if u not in (a, b)], ones)
            second[pos[a]][pos[b]] ^= term
            second[pos[b]][pos[a]] ^= term
        if len(mobile) == 3:
            a, b, c = (pos[v] for v in mono)
            cubic_pairs[a].append((b, c))
            cubic_pairs[b].append((a, c))
            cubic_pairs[c].append((a, b))

    total = lanes - 2 * value.bit_count()
    for step in range(1, 1 << g):
        k = (step & -step).bit_length() - 1
        value ^= first[k]
        total += lanes - 2 * value.bit_count()
        row = second[k]
        for u in range(g):
            first[u] ^= row[u]
        for a, b in cubic_pairs[k]:
            second[a][b] ^= ones
            second[b][a] ^= ones
    return total


def gap_gray(f: Polynomial3, workers: int = 1) -> int:
    """Same value as gap_naive.

    The low GRAY_LANE_BITS variables are packed into the lanes of one big
    integer word; the remaining variables are walked in Gray-code order,
    updating f and its first and second derivatives on every lane with one
    XOR per touched term. The walk is split into disjoint segments by fixing
    the top variables, one segment per job.
    """
    require_valid(f)
    check_limit("gap_gray", f.n, "GAP_MAX_N")
    lane_bits = min(f.n, iqp_setting("GRAY_LANE_BITS"))
    high = f.n - lane_bits
    split = min(high, max(0, (max(workers, 1) - 1).bit_length()))
    logger.debug("gap_gray n=%d: %d lane bits, %d segments", f.n, lane_bits, 1 << split)
    jobs = [(f, lane_bits, split, segment) for segment in range(1 << split)]
    return sum(ordered_map(_gray_segment, jobs, workers))


# --- Ising partition function ---

def _spin_rows(count_bits):
    xs = np.arange(1 << count_bits, dtype=np.int64)
    return 1 - 2 * ((xs[:, None] >> np.arange(count_bits)) & 1)


def _ising_chunks(job):
    inst, low, mode, h_start, h_stop = job
    w = inst.edge_matrix()
    v = inst.vertex_vector()
    t = inst.t
    spins_low = _spin_rows(low)
    energy_low = np.einsum("ai,ij,aj->a", spins_low, np.triu(w[:low, :low], 1), spins_low) + spins_low @ v[:low]
    w_cross = w[:low, low:]
    w_high = np.triu(w[low:, low:], 1)
    v_high = v[low:]
    high_bits = inst.n - low

    if mode == "exact":
        counts = np.zeros(EIGHTHS, dtype=np.int64)
        scale = 8 // t
    else:
        sums = np.empty(h_stop - h_start, dtype=np.complex128)
        table = np.exp(1j * np.pi * np.arange(2 * t) / t)
    for h in range(h_start, h_stop):
        spins_high = 1 - 2 * ((h >> np.arange(high_bits)) & 1)
        energy = energy_low + spins_low @ (w_cross @ spins_high) + (spins_high @ w_high @ spins_high + v_high @ spins_high)
        if mode == "exact":
            counts += np.bincount((energy * scale) % EIGHTHS, minlength=EIGHTHS)
        else:
            sums[h - h_start] = np.sum(table[energy % (2 * t)])
    return counts if mode == "exact" else sums


def ising_partition(inst: IsingInstance, mode: str = "float", workers: int = 1) -> AmplitudeValue:
    """Z(omega) = sum over spins z of omega**(sum w_ij z_i z_j + sum v_k z_k), unnormalized (n=0).

    Float mode sums fixed 2**FLOAT_CHUNK_BITS-term chunks, then the chunk
    sums in index order, so the result is bit-identical for any ``workers``.
    """
    require_valid(inst)
    if mode == "exact":
        if inst.t not in EXACT_ORDERS:
            raise UnsupportedOrder(f"exact mode needs t in {EXACT_ORDERS}, got t={inst.t}")
        check_limit("ising_partition", inst.n, "ISING_EXACT_MAX_N")
    elif mode == "float":
        check_limit("ising_partition", inst.n, "ISING_FLOAT_MAX_N")
    else:
        raise InvalidParameters(f"unknown mode {mode!r}")

    low = min(inst.n, iqp_setting("FLOAT_CHUNK_BITS"))
    chunks = 1 << (inst.n - low)
    groups = max(1, min(chunks, 4 * max(workers, 1)))
    bounds = [chunks * k // groups for k in range(groups + 1)]
    jobs = [(inst, low, mode, bounds[k], bounds[k + 1]) for k in range(groups) if bounds[k] < bounds[k + 1]]
    parts = ordered_map(_ising_chunks, jobs, workers)
    if mode == "exact":
        return AmplitudeValue.from_cyclotomic(Cyclotomic16.from_counts(np.sum(parts, axis=0)), 0)
    return AmplitudeValue(None, complex(np.sum(np.concatenate(parts))), 0)


# --- IQP circuit amplitudes ---

def _parity(xs, target):
    parity = np.zeros(xs.shape, dtype=np.int64)
    q = 0
    while target >> q:
        if (target >> q) & 1:
            parity ^= (xs >> q) & 1
        q += 1
    return parity


def _direct_block_counts(job):
    circuit, target, start, size = job
    xs = np.arange(start, start + size, dtype=np.int64)
    eighths = (diagonal_eighths(circuit, xs) + 8 * _parity(xs, target)) % EIGHTHS
    return np.bincount(eighths, minlength=EIGHTHS)


def amplitude_direct(circuit: IqpCircuit, y: str, workers: int = 1) -> AmplitudeValue:
    """<y|C|0> = 2**-n sum_x (-1)**(x.y') d(x), y' = y XOR x_mask, as an exact Z[zeta16] sum."""
    require_valid(circuit)
    check_limit("amplitude_direct", circuit.n, "DIRECT_MAX_N")
    target = _check_basis_string(y, circuit.n) ^ bits_to_int(circuit.x_mask)
    jobs = [(circuit, target, start, size) for start, size in _blocks(circuit.n)]
    counts = np.sum(ordered_map(_direct_block_counts, jobs, workers), axis=0)
    return AmplitudeValue.from_cyclotomic(Cyclotomic16.from_counts(counts), circuit.n)


# --- State-vector oracle ---

def _apply_hadamard(psi, q, n):
    view = psi.reshape(1 << (n - q - 1), 2, 1 << q)
    a = view[:, 0, :]
    b = view[:, 1, :]
    out = np.empty_like(view)
    out[:, 0, :] = (a + b) / np.sqrt(2)
    out[:, 1, :] = (a - b) / np.sqrt(2)
    return out.reshape(-1)


def _hadamard_layer(psi, n):
    for q in range(n):
        psi = _apply_hadamard(psi, q, n)
    return psi


def _phases(eighths):
    return np.exp(1j * np.pi * eighths / 8)


def statevector(circuit: Union[IqpCircuit, MixedCircuit]) -> np.ndarray:
    """Final state of the circuit on |0...0>, built gate by gate."""
    require_valid(circuit)
    n = circuit.n
    check_limit("statevector", n, "STATEVECTOR_MAX_N")
    size = 1 << n
    xs = np.arange(size, dtype=np.int64)
    psi = np.full(size, 1 / np.sqrt(size), dtype=np.complex128)
    if isinstance(circuit, IqpCircuit):
        psi = psi * _phases(diagonal_eighths(circuit, xs))
        psi = _hadamard_layer(psi, n)
        return psi[xs ^ bits_to_int(circuit.x_mask)]
    for op in circuit.ops:
        if isinstance(op, Hadamard):
            psi = _apply_hadamard(psi, op.qubit, n)
        else:
            hit = np.ones(size, dtype=bool)
            for q in op.support:
                hit &= ((xs >> q) & 1).astype(bool)
            psi = np.where(hit, psi * _phases(op.eighths), psi)
    return _hadamard_layer(psi, n)


def amplitude_statevector(circuit: Union[IqpCircuit, MixedCircuit], y: str) -> complex:
    index = _check_basis_string(y, circuit.n)
    return complex(statevector(circuit)[index])


def output_distribution(circuit: IqpCircuit) -> Distribution:
    require_valid(circuit)
    check_limit("output_distribution", circuit.n, "DISTRIBUTION_MAX_N")
    probs = np.abs(statevector(circuit)) ** 2
    return Distribution(circuit.n, probs / probs.sum())
