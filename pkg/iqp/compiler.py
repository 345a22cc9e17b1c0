"""Polynomials and Ising instances to IQP circuits; mixed circuits to IQP via Hadamard gadgets."""
import logging
from dataclasses import dataclass
from typing import Tuple

from iqp.core import (
    EIGHTHS, Hadamard, IqpCircuit, IsingInstance, MixedCircuit, PhaseGate, Polynomial3,
    Violation, require_valid,
)
from iqp.exceptions import InvalidInstance, UnsupportedOrder

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GadgetResult:
    circuit: IqpCircuit
    m: int
    postselect: Tuple[int, ...]  # qubits that must read 0

    @property
    def scale(self) -> float:
        """<0|U|0> = scale * <0|C|0>, scale = 2**(m/2)."""
        return 2 ** (self.m / 2)


def compile_poly(f: Polynomial3) -> IqpCircuit:
    """One CCZ per cubic term, CZ per quadratic term, Z per linear term: <0|C_f|0> = gap(f) / 2**n."""
    require_valid(f)
    gates = [PhaseGate.ccz(*triple) for triple in f.cubic]
    gates += [PhaseGate.cz(*pair) for pair in f.quadratic]
    gates += [PhaseGate.z(i) for i in f.linear]
    return IqpCircuit(f.n, tuple(gates))


def read_back_poly(circuit: IqpCircuit) -> Polynomial3:
    """Inverse of compile_poly for circuits made of Z, CZ and CCZ gates only."""
    require_valid(circuit)
    terms = {1: set(), 2: set(), 3: set()}
    for k, gate in enumerate(circuit.gates):
        if gate.eighths not in (0, 8):
            raise InvalidInstance([Violation(f"gates[{k}]", "not a Z, CZ or CCZ gate")])
        if gate.eighths:
            terms[len(gate.support)] ^= {gate.support}
    if circuit.phase_num or "1" in circuit.x_mask:
        raise InvalidInstance([Violation("circuit", "global phase or X mask has no polynomial form")])
    return Polynomial3(
        circuit.n,
        cubic=tuple(terms[3]),
        quadratic=tuple(terms[2]),
        linear=tuple(q for (q,) in terms[1]),
    )


def compile_ising(inst: IsingInstance) -> IqpCircuit:
    """IQP circuit C_I with <0|C_I|0> = Z(omega) / 2**n exactly, global phase included.

    Edge (i, j) becomes diag(1, 1, 1, i)**w_ij, vertex k becomes
    diag(1, exp(i*pi/4))**v'_k, and the global phase is omega**(sum w + sum v).
    """
    require_valid(inst)
    if inst.t != 8:
        raise UnsupportedOrder(f"compile_ising needs t=8, got t={inst.t}")
    gates = [
        PhaseGate((i, j), weight % 4, 2)
        for (i, j), weight in sorted(inst.edge_weights.items())
        if weight % 4
    ]
    gates += [PhaseGate((k,), weight, 4) for k, weight in enumerate(inst.derived_vertex_weights()) if weight]
    phase = (sum(inst.edge_weights.values()) + sum(inst.vertex_weights.values())) % EIGHTHS
    return IqpCircuit(inst.n, tuple(gates), phase_num=phase)


def emit_repeated(circuit: IqpCircuit) -> IqpCircuit:
    """Expand every pair gate of numerator w over 2 into w unit diag(1, 1, 1, i) gates."""
    gates = []
    for gate in circuit.gates:
        if len(gate.support) == 2 and gate.denominator == 2:
            gates.extend(PhaseGate(gate.support, 1, 2) for _ in range(gate.numerator))
        else:
            gates.append(gate)
    return IqpCircuit(circuit.n, tuple(gates), circuit.x_mask, circuit.phase_num)


def gadgetize(u: MixedCircuit) -> GadgetResult:
    """Replace every intermediate Hadamard by a fresh qubit joined with CZ.

    A Hadamard on qubit j allocates qubit e (appended after the original n in
    encounter order), emits CZ(j, e), and sends later operations on j to e.
    The result satisfies <0|U|0> = 2**(m/2) <0...0|C|0...0>.
    """
    require_valid(u)
    wires = list(range(u.n))
    gates = []
    fresh = u.n
    for op in u.ops:
        if isinstance(op, Hadamard):
            gates.append(PhaseGate.cz(wires[op.qubit], fresh))
            wires[op.qubit] = fresh
            fresh += 1
        else:
            gates.append(op.remapped(wires))
    m = fresh - u.n
    logger.debug("gadgetized %d intermediate Hadamards onto %d qubits", m, fresh)
    return GadgetResult(IqpCircuit(fresh, tuple(gates)), m, tuple(range(fresh)))


def gadget_amplitude_bound(approx: float, m: int) -> float:
    """A multiplicative approximation of <0|C|0> scaled to one of <0|U|0>, same relative error."""
    return 2 ** (m / 2) * approx
