"""Circuit JSON and the flat gate-list text format."""

from __future__ import annotations

import json
import re
from typing import Any

from .circuit import Circuit, DepthConvention, Layer, RegisterMap
from .errors import InvalidCircuit
from .expand import expand_macros
from .gates import (
    ControlledXor,
    FanOut,
    Gate,
    GlobalCZ,
    MultiToffoli,
    ProductReflection,
    SingleQubit,
    WeightOracle,
)


def _c(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _z(pair) -> complex:
    return complex(pair[0], pair[1])


def gate_to_json(g: Gate) -> dict[str, Any]:
    if isinstance(g, SingleQubit):
        return {"gate": "1q", "target": g.target, "label": g.label,
                "matrix": [[_c(g.matrix[0]), _c(g.matrix[1])], [_c(g.matrix[2]), _c(g.matrix[3])]]}
    if isinstance(g, GlobalCZ):
        return {"gate": "gcz", "support": list(g.support)}
    if isinstance(g, FanOut):
        return {"gate": "fanout", "control": g.control, "targets": list(g.targets)}
    if isinstance(g, MultiToffoli):
        return {"gate": "mct", "controls": [[q, "+" if p else "-"] for q, p in g.controls],
                "target": g.target}
    if isinstance(g, ProductReflection):
        return {"gate": "prodref", "support": [[q, [_c(v[0]), _c(v[1])]] for q, v in g.support]}
    if isinstance(g, ControlledXor):
        return {"gate": "cxor", "control": g.control, "pairs": [list(p) for p in g.pairs]}
    if isinstance(g, WeightOracle):
        return {"gate": "weight", "inputs": list(g.inputs), "target": g.target, "weights": list(g.weights)}
    raise InvalidCircuit(f"cannot serialize {g!r}")


def gate_from_json(d: dict[str, Any]) -> Gate:
    kind = d["gate"]
    if kind == "1q":
        m = d["matrix"]
        return SingleQubit(d["target"], (_z(m[0][0]), _z(m[0][1]), _z(m[1][0]), _z(m[1][1])), d.get("label", ""))
    if kind == "gcz":
        return GlobalCZ(tuple(d["support"]))
    if kind == "fanout":
        return FanOut(d["control"], tuple(d["targets"]))
    if kind == "mct":
        return MultiToffoli(tuple((q, p == "+") for q, p in d["controls"]), d["target"])
    if kind == "prodref":
        return ProductReflection(tuple((q, (_z(v[0]), _z(v[1]))) for q, v in d["support"]))
    if kind == "cxor":
        return ControlledXor(d["control"], tuple(tuple(p) for p in d["pairs"]))
    if kind == "weight":
        return WeightOracle(tuple(d["inputs"]), d["target"], tuple(d["weights"]))
    raise InvalidCircuit(f"unknown gate kind {kind!r}")


def circuit_to_json(c: Circuit) -> dict[str, Any]:
    return {
        "n": c.qubit_count,
        "model": c.model,
        "convention": c.convention.to_json(),
        "registers": c.registers.to_json(),
        "layers": [[gate_to_json(g) for g in layer.gates] for layer in c.layers],
    }


def circuit_from_json(d: dict[str, Any]) -> Circuit:
    regs = RegisterMap.from_json(d["registers"])
    conv = DepthConvention(**d.get("convention", {}))
    layers = tuple(Layer(tuple(gate_from_json(g) for g in layer)) for layer in d["layers"])
    return Circuit(d["n"], layers, regs, d["model"], conv)


def dumps(obj: Any) -> str:
    """Deterministic JSON text (sorted keys, fixed separators)."""
    return json.dumps(obj, sort_keys=True, indent=1, separators=(",", ": ")) + "\n"


# ----------------------------------------------------------------- text format

def _fmt_complex(z: complex) -> str:
    return f"{z.real!r}{z.imag:+}j"


def gate_line(g: Gate) -> str:
    if isinstance(g, GlobalCZ):
        return "GCZ " + " ".join(map(str, g.support))
    if isinstance(g, FanOut):
        return f"FANOUT {g.control} -> " + " ".join(map(str, g.targets))
    if isinstance(g, SingleQubit):
        m = [_fmt_complex(v) for v in g.matrix]
        return f"U1Q {g.target} [[{m[0]},{m[1]}],[{m[2]},{m[3]}]]"
    if isinstance(g, WeightOracle):
        return ("WEIGHT " + " ".join(map(str, g.inputs)) + f" -> {g.target} {{"
                + ",".join(map(str, g.weights)) + "}")
    raise InvalidCircuit(f"{type(g).__name__} has no gate-list form; expand macros first")


def to_gate_list(c: Circuit) -> str:
    """Flat export of the expanded circuit; ``LAYER`` lines separate layers."""
    c = expand_macros(c)
    lines = [f"# qubits {c.qubit_count} model {c.model}"]
    for layer in c.layers:
        lines.append("LAYER")
        lines.extend(gate_line(g) for g in layer.gates)
    return "\n".join(lines) + "\n"


_U1Q = re.compile(r"U1Q (\d+) \[\[([^,\]]+),([^\]]+)\],\[([^,\]]+),([^\]]+)\]\]")


def parse_gate_line(line: str) -> Gate:
    if line.startswith("GCZ "):
        return GlobalCZ(tuple(int(t) for t in line[4:].split()))
    if line.startswith("FANOUT "):
        left, right = line[7:].split("->")
        return FanOut(int(left), tuple(int(t) for t in right.split()))
    if line.startswith("U1Q "):
        m = _U1Q.fullmatch(line.strip())
        if not m:
            raise InvalidCircuit(f"malformed U1Q line: {line!r}")
        return SingleQubit(int(m.group(1)), tuple(complex(m.group(i)) for i in range(2, 6)))
    if line.startswith("WEIGHT "):
        left, right = line[7:].split("->")
        target, weights = right.split("{")
        return WeightOracle(tuple(int(t) for t in left.split()), int(target),
                            tuple(int(w) for w in weights.rstrip("} \n").split(",") if w))
    raise InvalidCircuit(f"unknown gate line {line!r}")


def parse_gate_list(text: str) -> tuple[int, list[list[Gate]]]:
    """Returns (qubit count, layers) from :func:`to_gate_list` output."""
    n = None
    layers: list[list[Gate]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line.split()
            if "qubits" in parts:
                n = int(parts[parts.index("qubits") + 1])
            continue
        if line == "LAYER":
            layers.append([])
            continue
        if not layers:
            layers.append([])
        layers[-1].append(parse_gate_line(line))
    if n is None:
        n = 1 + max((q for l in layers for g in l for q in g.qubits), default=-1)
    return n, layers
