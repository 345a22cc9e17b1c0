"""
Domain model: degree-3 polynomials over F2, complete-graph Ising instances,
IQP circuits of diagonal phase gates, and mixed circuits with intermediate
Hadamards.

Conventions used everywhere in the app:

* qubits and variables are 0-based;
* a basis string is a str of '0'/'1' where character ``i`` is qubit ``i``;
  its integer index has bit ``i`` set iff character ``i`` is '1';
* phases are exact integers in units of pi/8 ("eighths"), reduced mod 16.
"""
import dataclasses
from dataclasses import dataclass, field
from typing import Mapping, Tuple, Union

import numpy as np

from iqp.exceptions import InvalidInstance

EIGHTHS = 16  # a full turn, in units of pi/8
GATE_DENOMINATORS = (1, 2, 4, 8)


# --- Basis strings ---

def bits_to_int(bits: str) -> int:
    value = 0
    for i, ch in enumerate(bits):
        if ch == "1":
            value |= 1 << i
        elif ch != "0":
            raise InvalidInstance([Violation("bits", f"character {ch!r} is not a bit")])
    return value


def int_to_bits(value: int, n: int) -> str:
    return "".join("1" if (value >> i) & 1 else "0" for i in range(n))


def xor_bits(a: str, b: str) -> str:
    if len(a) != len(b):
        raise InvalidInstance([Violation("mask", f"length {len(b)} does not match {len(a)}")])
    return int_to_bits(bits_to_int(a) ^ bits_to_int(b), len(a))


def _require_length(bits: str, n: int, path: str):
    if len(bits) != n:
        raise InvalidInstance([Violation(path, f"length {len(bits)} does not match n={n}")])


@dataclass(frozen=True)
class Violation:
    path: str
    message: str

    def __str__(self):
        return f"{self.path}: {self.message}"


@dataclass(frozen=True)
class Phase:
    """A unit complex number exp(i*pi*eighths/8), kept exact."""

    eighths: int = 0

    def __post_init__(self):
        object.__setattr__(self, "eighths", self.eighths % EIGHTHS)

    def __mul__(self, other: "Phase") -> "Phase":
        return Phase(self.eighths + other.eighths)

    @property
    def value(self) -> complex:
        angle = np.pi * self.eighths / 8
        return complex(np.cos(angle), np.sin(angle))

    def __str__(self):
        return f"exp(i*pi*{self.eighths}/8)"


# --- Polynomials ---

@dataclass(frozen=True)
class Polynomial3:
    """f(x) = sum of cubic, quadratic and linear monomials over F2, f(0) = 0."""

    n: int
    cubic: Tuple[Tuple[int, int, int], ...] = ()
    quadratic: Tuple[Tuple[int, int], ...] = ()
    linear: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "cubic", tuple(sorted(tuple(t) for t in self.cubic)))
        object.__setattr__(self, "quadratic", tuple(sorted(tuple(p) for p in self.quadratic)))
        object.__setattr__(self, "linear", tuple(sorted(self.linear)))

    def monomials(self):
        yield from self.cubic
        yield from self.quadratic
        for i in self.linear:
            yield (i,)

    @property
    def num_terms(self) -> int:
        return len(self.cubic) + len(self.quadratic) + len(self.linear)

    def evaluate(self, x: Union[int, str]) -> int:
        if isinstance(x, str):
            _require_length(x, self.n, "x")
            x = bits_to_int(x)
        value = 0
        for mono in self.monomials():
            if all((x >> i) & 1 for i in mono):
                value ^= 1
        return value

    def with_linear_mask(self, mask: str) -> "Polynomial3":
        """Add x.mask to f: the polynomial whose gap is the amplitude at basis string ``mask``."""
        _require_length(mask, self.n, "mask")
        linear = set(self.linear) ^ {i for i, ch in enumerate(mask) if ch == "1"}
        return dataclasses.replace(self, linear=tuple(linear))


# --- Ising instances ---

@dataclass(frozen=True)
class IsingInstance:
    """Complete-graph Ising model with integer weights, evaluated at omega = exp(i*pi/t)."""

    n: int
    edge_weights: Mapping[Tuple[int, int], int]
    vertex_weights: Mapping[int, int]
    t: int = 8

    def __post_init__(self):
        edges = {tuple(pair): weight for pair, weight in dict(self.edge_weights).items()}
        object.__setattr__(self, "edge_weights", edges)
        object.__setattr__(self, "vertex_weights", dict(self.vertex_weights))

    def __hash__(self):
        return hash((self.n, self.t, tuple(sorted(self.edge_weights.items())),
                     tuple(sorted(self.vertex_weights.items()))))

    def edge_matrix(self) -> np.ndarray:
        """Symmetric n x n integer matrix of edge weights, zero diagonal."""
        w = np.zeros((self.n, self.n), dtype=np.int64)
        for (i, j), weight in self.edge_weights.items():
            w[i, j] = w[j, i] = weight
        return w

    def vertex_vector(self) -> np.ndarray:
        return np.array([self.vertex_weights.get(k, 0) for k in range(self.n)], dtype=np.int64)

    def derived_vertex_weights(self) -> Tuple[int, ...]:
        """v'_k = -v_k - sum_{j != k} w_jk, reduced mod t (the period of omega**2)."""
        column_sums = self.edge_matrix().sum(axis=0)
        return tuple(int(x) for x in (-self.vertex_vector() - column_sums) % self.t)


# --- Circuits ---

@dataclass(frozen=True)
class PhaseGate:
    """Multiplies basis state x by exp(i*pi*numerator/denominator) iff all support bits of x are 1."""

    support: Tuple[int, ...]
    numerator: int = 1
    denominator: int = 1

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(self.support))

    @property
    def eighths(self) -> int:
        return (self.numerator * (8 // self.denominator)) % EIGHTHS

    @classmethod
    def z(cls, q):
        return cls((q,), 1, 1)

    @classmethod
    def cz(cls, a, b):
        return cls(tuple(sorted((a, b))), 1, 1)

    @classmethod
    def ccz(cls, a, b, c):
        return cls(tuple(sorted((a, b, c))), 1, 1)

    @classmethod
    def t(cls, q):
        return cls((q,), 1, 4)

    @classmethod
    def sqrt_cz(cls, a, b):
        # also the Ising edge gate diag(1, 1, 1, i)
        return cls(tuple(sorted((a, b))), 1, 2)

    def remapped(self, wires) -> "PhaseGate":
        return PhaseGate(tuple(sorted(wires[q] for q in self.support)), self.numerator, self.denominator)


@dataclass(frozen=True)
class Hadamard:
    qubit: int


@dataclass(frozen=True)
class IqpCircuit:
    """H^n . D . H^n followed by X on every set bit of ``x_mask``; D is the product of ``gates``."""

    n: int
    gates: Tuple[PhaseGate, ...] = ()
    x_mask: str = ""
    phase_num: int = 0  # global phase, in eighths

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if not self.x_mask:
            object.__setattr__(self, "x_mask", "0" * self.n)

    @property
    def global_phase(self) -> Phase:
        return Phase(self.phase_num)

    def then(self, other: "IqpCircuit") -> "IqpCircuit":
        """Concatenate the diagonal parts; masks XOR and global phases multiply."""
        if other.n != self.n:
            raise InvalidInstance([Violation("n", f"cannot join {self.n} and {other.n} qubits")])
        return IqpCircuit(
            self.n,
            self.gates + other.gates,
            xor_bits(self.x_mask, other.x_mask),
            (self.phase_num + other.phase_num) % EIGHTHS,
        )


@dataclass(frozen=True)
class MixedCircuit:
    """Diagonal gates and intermediate Hadamards between implicit leading and trailing H layers."""

    n: int
    ops: Tuple[Union[PhaseGate, Hadamard], ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))

    @property
    def m(self) -> int:
        return sum(1 for op in self.ops if isinstance(op, Hadamard))


# --- Validation ---

def is_integer(value) -> bool:
    """True for Python and numpy integers; bools and floats are not integers here."""
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def _check_indices(path, indices, n, arity, violations):
    if not isinstance(indices, (tuple, list)):
        violations.append(Violation(path, f"expected {arity} indices, got {indices!r}"))
        return
    if len(indices) != arity:
        violations.append(Violation(path, f"expected {arity} indices, got {len(indices)}"))
        return
    for i in indices:
        if not is_integer(i):
            violations.append(Violation(path, f"index {i!r} is not an integer"))
        elif not 0 <= i < n:
            violations.append(Violation(path, f"index {i} out of range"))
    if all(is_integer(i) for i in indices) and any(a >= b for a, b in zip(indices, indices[1:])):
        violations.append(Violation(path, "indices not strictly increasing"))


def _check_weight(path, weight, modulus, violations):
    if not is_integer(weight):
        violations.append(Violation(path, f"weight {weight!r} is not an integer"))
    elif not 0 <= weight < modulus:
        violations.append(Violation(path, f"weight not reduced mod {modulus}"))


def _check_duplicates(path, items, violations):
    seen = set()
    for item in items:
        try:
            if item in seen:
                violations.append(Violation(path, f"duplicate entry {item}"))
            seen.add(item)
        except TypeError:
            continue  # unhashable entries are already reported by _check_indices


def _validate_poly(f: Polynomial3):
    violations = []
    if not is_integer(f.n) or f.n < 1:
        return [Violation("n", "must be a positive integer")]
    for k, triple in enumerate(f.cubic):
        _check_indices(f"cubic[{k}]", triple, f.n, 3, violations)
    for k, pair in enumerate(f.quadratic):
        _check_indices(f"quadratic[{k}]", pair, f.n, 2, violations)
    for k, i in enumerate(f.linear):
        _check_indices(f"linear[{k}]", (i,), f.n, 1, violations)
    _check_duplicates("cubic", f.cubic, violations)
    _check_duplicates("quadratic", f.quadratic, violations)
    _check_duplicates("linear", f.linear, violations)
    return violations


def _validate_ising(inst: IsingInstance):
    violations = []
    if not is_integer(inst.n) or inst.n < 1:
        return [Violation("n", "must be a positive integer")]
    if not is_integer(inst.t) or inst.t < 1:
        violations.append(Violation("t", "must be a positive integer"))
        modulus = None
    else:
        modulus = 2 * inst.t
    for pair, weight in inst.edge_weights.items():
        path = f"edges[{pair[0]},{pair[1]}]" if len(pair) == 2 else f"edges[{pair}]"
        _check_indices(path, pair, inst.n, 2, violations)
        if modulus is not None:
            _check_weight(path, weight, modulus, violations)
    for k, weight in inst.vertex_weights.items():
        _check_indices(f"vertices[{k}]", (k,), inst.n, 1, violations)
        if modulus is not None:
            _check_weight(f"vertices[{k}]", weight, modulus, violations)
    for i in range(inst.n):
        if i not in inst.vertex_weights:
            violations.append(Violation(f"vertices[{i}]", "missing weight"))
        for j in range(i + 1, inst.n):
            if (i, j) not in inst.edge_weights:
                violations.append(Violation(f"edges[{i},{j}]", "missing weight"))
    return violations


def _validate_gate(path, gate: PhaseGate, n, violations):
    if not 1 <= len(gate.support) <= 3:
        violations.append(Violation(f"{path}.support", "must hold 1 to 3 qubits"))
    else:
        _check_indices(f"{path}.support", gate.support, n, len(gate.support), violations)
    if not is_integer(gate.denominator) or gate.denominator not in GATE_DENOMINATORS:
        violations.append(Violation(f"{path}.denominator", f"{gate.denominator!r} not in {GATE_DENOMINATORS}"))
    elif not is_integer(gate.numerator):
        violations.append(Violation(f"{path}.numerator", f"{gate.numerator!r} is not an integer"))
    elif not 0 <= gate.numerator < 2 * gate.denominator:
        violations.append(Violation(f"{path}.numerator", f"not reduced mod {2 * gate.denominator}"))


def _validate_circuit(circuit: IqpCircuit):
    violations = []
    if not is_integer(circuit.n) or circuit.n < 1:
        return [Violation("n", "must be a positive integer")]
    for k, gate in enumerate(circuit.gates):
        _validate_gate(f"gates[{k}]", gate, circuit.n, violations)
    mask = circuit.x_mask
    if not isinstance(mask, str) or len(mask) != circuit.n or set(mask) - {"0", "1"}:
        violations.append(Violation("x_mask", f"must be a {circuit.n}-bit string"))
    if not is_integer(circuit.phase_num) or not 0 <= circuit.phase_num < EIGHTHS:
        violations.append(Violation("phase_num", f"not reduced mod {EIGHTHS}"))
    return violations


def _validate_mixed(circuit: MixedCircuit):
    violations = []
    if not is_integer(circuit.n) or circuit.n < 1:
        return [Violation("n", "must be a positive integer")]
    for k, op in enumerate(circuit.ops):
        if isinstance(op, Hadamard):
            if not is_integer(op.qubit) or not 0 <= op.qubit < circuit.n:
                violations.append(Violation(f"ops[{k}].qubit", f"index {op.qubit} out of range"))
        else:
            _validate_gate(f"ops[{k}]", op, circuit.n, violations)
    return violations


_VALIDATORS = {
    Polynomial3: _validate_poly,
    IsingInstance: _validate_ising,
    IqpCircuit: _validate_circuit,
    MixedCircuit: _validate_mixed,
}


def validate(obj):
    """Return every violated invariant as a list of Violations; an empty list means ok."""
    try:
        validator = _VALIDATORS[type(obj)]
    except KeyError:
        raise TypeError(f"cannot validate {type(obj).__name__}") from None
    return validator(obj)


def require_valid(obj):
    violations = validate(obj)
    if violations:
        raise InvalidInstance(violations)
    return obj


# --- Phase evaluation ---

def diagonal_eighths(circuit: IqpCircuit, xs: np.ndarray) -> np.ndarray:
    """Exact phase exponent of D (global phase included) for an array of basis indices."""
    xs = np.asarray(xs, dtype=np.int64)
    total = np.full(xs.shape, circuit.phase_num, dtype=np.int64)
    for support, eighths in merged_gates(circuit.gates).items():
        hit = np.ones(xs.shape, dtype=bool)
        for q in support:
            hit &= ((xs >> q) & 1).astype(bool)
        total += eighths * hit
    return total % EIGHTHS


def merged_gates(gates) -> dict:
    """Gates commute, so phases on the same support simply add."""
    merged = {}
    for gate in gates:
        merged[gate.support] = (merged.get(gate.support, 0) + gate.eighths) % EIGHTHS
    return {support: e for support, e in merged.items() if e}


def diagonal_phase(circuit: IqpCircuit, x: str) -> Phase:
    _require_length(x, circuit.n, "x")
    index = bits_to_int(x)
    eighths = circuit.phase_num
    for gate in circuit.gates:
        if all((index >> q) & 1 for q in gate.support):
            eighths += gate.eighths
    return Phase(eighths)


def apply_xmask(circuit: IqpCircuit, mask: str) -> IqpCircuit:
    _require_length(mask, circuit.n, "mask")
    return dataclasses.replace(circuit, x_mask=xor_bits(circuit.x_mask, mask))
