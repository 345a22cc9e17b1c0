"""Backend dispatch for single amplitudes, shared by the command line and the GraphQL API."""
import logging

from iqp.amplitude import (
    EXACT_ORDERS, AmplitudeValue, amplitude_direct, amplitude_statevector, gap_gray, gap_naive,
    ising_partition,
)
from iqp.compiler import compile_ising, compile_poly
from iqp.conf import iqp_setting
from iqp.core import IqpCircuit, IsingInstance, MixedCircuit, Polynomial3, require_valid
from iqp.exceptions import InvalidParameters

logger = logging.getLogger(__name__)

BACKENDS = ("gap", "gray", "direct", "statevector", "ising")
ISING_MODES = ("exact", "float")

_DEFAULT_BACKEND = {
    Polynomial3: "gray",
    IsingInstance: "ising",
    IqpCircuit: "direct",
    MixedCircuit: "statevector",
}

_SUPPORTED = {
    Polynomial3: {"gap", "gray", "direct", "statevector"},
    IsingInstance: {"ising", "direct", "statevector"},
    IqpCircuit: {"direct", "statevector"},
    MixedCircuit: {"statevector"},
}


def default_backend(obj):
    return _DEFAULT_BACKEND[type(obj)]


def default_ising_mode(inst: IsingInstance) -> str:
    """Exact when the order allows it and n is under the exact guard, float otherwise."""
    if inst.t in EXACT_ORDERS and inst.n <= iqp_setting("ISING_EXACT_MAX_N"):
        return "exact"
    return "float"


def evaluate_amplitude(obj, y=None, backend=None, workers=1, mode=None) -> AmplitudeValue:
    """<y|C|0> for the circuit that ``obj`` denotes; y defaults to the all-zero string.

    ``mode`` picks exact or float evaluation for the ising backend and is
    rejected by the others; None picks :func:`default_ising_mode`.
    """
    if type(obj) not in _SUPPORTED:
        raise InvalidParameters(f"cannot evaluate an amplitude of a {type(obj).__name__}")
    require_valid(obj)
    backend = backend or default_backend(obj)
    if backend not in _SUPPORTED[type(obj)]:
        raise InvalidParameters(f"backend {backend!r} does not accept a {type(obj).__name__}")
    if mode is not None and backend != "ising":
        raise InvalidParameters(f"mode only applies to the ising backend, not {backend!r}")
    y = y if y is not None else "0" * obj.n
    logger.debug("evaluating <%s|C|0> with the %s backend", y, backend)

    if backend in ("gap", "gray"):
        g = obj.with_linear_mask(y)
        gap = gap_naive(g) if backend == "gap" else gap_gray(g, workers)
        return AmplitudeValue(gap, complex(gap / 2 ** obj.n), obj.n)
    if backend == "ising":
        if "1" in y:
            raise InvalidParameters("the ising backend only evaluates the all-zero amplitude")
        mode = mode or default_ising_mode(obj)
        z = ising_partition(obj, mode, workers)
        return AmplitudeValue(z.exact, z.value / 2 ** obj.n, obj.n)

    circuit = obj
    if isinstance(obj, Polynomial3):
        circuit = compile_poly(obj)
    elif isinstance(obj, IsingInstance):
        circuit = compile_ising(obj)
    if backend == "direct":
        return amplitude_direct(circuit, y, workers)
    return AmplitudeValue(None, amplitude_statevector(circuit, y), circuit.n)
