"""UTF-8 JSON instance files: poly3, ising, circuit, mixed and xmask documents."""
import json

from iqp.core import (
    Hadamard, IqpCircuit, IsingInstance, MixedCircuit, PhaseGate, Polynomial3, Violation, is_integer,
)
from iqp.exceptions import InvalidInstance

KINDS = ("poly3", "ising", "circuit", "mixed", "xmask")


def _fail(path, message):
    raise InvalidInstance([Violation(path, message)])


def _field(data, name):
    try:
        return data[name]
    except (KeyError, TypeError):
        _fail(name, "missing field")


def _integer(path, value):
    if not is_integer(value):
        _fail(path, f"expected an integer, got {value!r}")
    return value


def _list(data, name):
    value = data.get(name, [])
    if not isinstance(value, list):
        _fail(name, f"expected a list, got {value!r}")
    return value


def _integers(path, value, length=None):
    """A JSON list of integers, as a tuple; ranges are left to validate()."""
    if not isinstance(value, list):
        _fail(path, f"expected a list of integers, got {value!r}")
    if length is not None and len(value) != length:
        _fail(path, f"expected {length} entries, got {len(value)}")
    return tuple(_integer(f"{path}[{k}]", v) for k, v in enumerate(value))


def _gate_from_dict(path, item):
    if not isinstance(item, dict) or "q" not in item:
        _fail(path, "expected an object with a 'q' field")
    return PhaseGate(
        _integers(f"{path}.q", item["q"]),
        _integer(f"{path}.num", item.get("num", 1)),
        _integer(f"{path}.den", item.get("den", 1)),
    )


def _gate_to_dict(gate):
    return {"q": list(gate.support), "num": gate.numerator, "den": gate.denominator}


def from_dict(data):
    """Build a core object from a decoded document. Structural errors raise InvalidInstance."""
    if not isinstance(data, dict):
        _fail("$", "expected a JSON object")
    kind = _field(data, "kind")
    n = _field(data, "n")
    if not is_integer(n):
        _fail("n", "must be an integer")
    if kind == "poly3":
        return Polynomial3(
            n,
            cubic=tuple(_integers(f"cubic[{k}]", t, 3) for k, t in enumerate(_list(data, "cubic"))),
            quadratic=tuple(_integers(f"quadratic[{k}]", p, 2) for k, p in enumerate(_list(data, "quadratic"))),
            linear=_integers("linear", _list(data, "linear")),
        )
    if kind == "ising":
        edges = {}
        for k, entry in enumerate(_list(data, "edges")):
            if not isinstance(entry, list) or len(entry) != 3:
                _fail(f"edges[{k}]", "expected [i, j, weight]")
            i, j, weight = _integers(f"edges[{k}]", entry)
            edges[(i, j)] = weight
        vertices = _integers("vertices", _list(data, "vertices"))
        return IsingInstance(n, edges, dict(enumerate(vertices)), t=_integer("t", data.get("t", 8)))
    if kind == "circuit":
        gates = tuple(_gate_from_dict(f"gates[{k}]", g) for k, g in enumerate(_list(data, "gates")))
        x_mask = data.get("x_mask", "")
        if not isinstance(x_mask, str):
            _fail("x_mask", f"expected a bit string, got {x_mask!r}")
        return IqpCircuit(n, gates, x_mask, _integer("phase_num", data.get("phase_num", 0)))
    if kind == "mixed":
        ops = []
        for k, item in enumerate(_list(data, "ops")):
            if isinstance(item, dict) and "h" in item:
                ops.append(Hadamard(_integer(f"ops[{k}].h", item["h"])))
            else:
                ops.append(_gate_from_dict(f"ops[{k}]", item))
        return MixedCircuit(n, tuple(ops))
    if kind == "xmask":
        mask = _field(data, "mask")
        if not isinstance(mask, str):
            _fail("mask", f"expected a bit string, got {mask!r}")
        if len(mask) != n:
            _fail("mask", f"length {len(mask)} does not match n={n}")
        return mask
    _fail("kind", f"unknown kind {kind!r}, expected one of {', '.join(KINDS)}")


def to_dict(obj):
    if isinstance(obj, Polynomial3):
        return {
            "kind": "poly3",
            "n": obj.n,
            "cubic": [list(t) for t in obj.cubic],
            "quadratic": [list(p) for p in obj.quadratic],
            "linear": list(obj.linear),
        }
    if isinstance(obj, IsingInstance):
        return {
            "kind": "ising",
            "n": obj.n,
            "t": obj.t,
            "edges": [[i, j, w] for (i, j), w in sorted(obj.edge_weights.items())],
            "vertices": [obj.vertex_weights[k] for k in range(obj.n)],
        }
    if isinstance(obj, IqpCircuit):
        return {
            "kind": "circuit",
            "n": obj.n,
            "gates": [_gate_to_dict(g) for g in obj.gates],
            "x_mask": obj.x_mask,
            "phase_num": obj.phase_num,
        }
    if isinstance(obj, MixedCircuit):
        return {
            "kind": "mixed",
            "n": obj.n,
            "ops": [{"h": op.qubit} if isinstance(op, Hadamard) else _gate_to_dict(op) for op in obj.ops],
        }
    if isinstance(obj, str):
        return {"kind": "xmask", "n": len(obj), "mask": obj}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def loads(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        _fail("$", f"not valid JSON: {exc}")
    return from_dict(data)


def dumps(obj):
    return json.dumps(to_dict(obj))


def load(path):
    with open(path, encoding="utf-8") as handle:
        return loads(handle.read())
