"""Circuit representation, register roles and depth accounting."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import CompositionError, InvalidCircuit, InvalidGate, InvalidRegister, MacroNotExpanded
from .gates import FanOut, Gate, GlobalCZ, WeightOracle

MODELS = ("qac0", "qac0f")
BASE_ROLES = ("system", "ancilla", "flag", "output", "selection")


def is_valid_role(role: str) -> bool:
    if role in BASE_ROLES:
        return True
    return role.startswith("block(") and role.endswith(")") and role[6:-1].isdigit()


def block_role(i: int) -> str:
    return f"block({i})"


@dataclass(frozen=True)
class DepthConvention:
    """Constants of the depth model.

    ``fanout_log_factor`` is the c in the QAC0 fan-out width bound
    ``|targets| <= c * ceil(log2 N)``; ``fanout_depth`` is what one FanOut
    layer costs in QAC0; ``oracle_depth`` is what one WeightOracle layer costs.
    """

    fanout_log_factor: float = 4.0
    fanout_depth: int = 1
    oracle_depth: int = 1

    def fanout_width_limit(self, qubit_count: int) -> int:
        return int(math.floor(self.fanout_log_factor * max(1, math.ceil(math.log2(max(qubit_count, 2))))))

    def to_json(self) -> dict:
        return {
            "fanout_log_factor": self.fanout_log_factor,
            "fanout_depth": self.fanout_depth,
            "oracle_depth": self.oracle_depth,
        }


@dataclass(frozen=True)
class Layer:
    gates: tuple[Gate, ...]

    def __post_init__(self):
        gates = tuple(self.gates)
        seen: set[int] = set()
        for g in gates:
            for q in g.qubits:
                if q in seen:
                    raise InvalidGate(f"qubit {q} used twice in one layer")
                seen.add(q)
        object.__setattr__(self, "gates", gates)

    @property
    def qubits(self) -> frozenset[int]:
        return frozenset(q for g in self.gates for q in g.qubits)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def __len__(self) -> int:
        return len(self.gates)


@dataclass(frozen=True)
class RegisterMap:
    """Role of every qubit plus named, disjoint register groups."""

    roles: tuple[str, ...]
    groups: tuple[tuple[str, tuple[int, ...]], ...] = ()

    def __post_init__(self):
        roles = tuple(self.roles)
        for q, r in enumerate(roles):
            if not is_valid_role(r):
                raise InvalidRegister(f"qubit {q} has unknown role {r!r}")
        groups = tuple((str(name), tuple(int(q) for q in qs)) for name, qs in self.groups)
        seen: dict[int, str] = {}
        names = set()
        for name, qs in groups:
            if name in names:
                raise InvalidRegister(f"duplicate register group {name!r}")
            names.add(name)
            for q in qs:
                if not 0 <= q < len(roles):
                    raise InvalidRegister(f"group {name!r} names qubit {q} outside the register")
                if q in seen:
                    raise InvalidRegister(f"qubit {q} belongs to groups {seen[q]!r} and {name!r}")
                seen[q] = name
        object.__setattr__(self, "roles", roles)
        object.__setattr__(self, "groups", groups)

    @classmethod
    def simple(cls, n_system: int, n_ancilla: int = 0) -> "RegisterMap":
        roles = ("system",) * n_system + ("ancilla",) * n_ancilla
        groups = [("x", tuple(range(n_system)))] if n_system else []
        return cls(roles, tuple(groups))

    @property
    def qubit_count(self) -> int:
        return len(self.roles)

    def role(self, q: int) -> str:
        return self.roles[q]

    def with_role(self, role: str) -> tuple[int, ...]:
        return tuple(q for q, r in enumerate(self.roles) if r == role)

    def group(self, name: str) -> tuple[int, ...]:
        for g, qs in self.groups:
            if g == name:
                return qs
        raise InvalidRegister(f"no register group named {name!r}")

    def has_group(self, name: str) -> bool:
        return any(g == name for g, _ in self.groups)

    @property
    def group_names(self) -> tuple[str, ...]:
        return tuple(g for g, _ in self.groups)

    def relabeled(self, changes: Mapping[int, str]) -> "RegisterMap":
        roles = list(self.roles)
        for q, r in changes.items():
            roles[q] = r
        return RegisterMap(tuple(roles), self.groups)

    def to_json(self) -> dict:
        return {"roles": list(self.roles), "groups": {name: list(qs) for name, qs in self.groups}}

    @classmethod
    def from_json(cls, data: Mapping) -> "RegisterMap":
        return cls(tuple(data["roles"]), tuple((k, tuple(v)) for k, v in data.get("groups", {}).items()))


class RegisterAllocator:
    """Hands out consecutive qubit indices and remembers roles and groups."""

    def __init__(self):
        self._roles: list[str] = []
        self._groups: dict[str, list[int]] = {}

    @property
    def count(self) -> int:
        return len(self._roles)

    def register(self, name: str, size: int, role: str) -> tuple[int, ...]:
        if name in self._groups:
            raise InvalidRegister(f"register {name!r} already allocated")
        qs = tuple(range(self.count, self.count + size))
        self._roles.extend([role] * size)
        self._groups[name] = list(qs)
        return qs

    def fresh(self, group: str, role: str = "ancilla") -> int:
        """One more qubit appended to ``group`` (created on first use)."""
        q = self.count
        self._roles.append(role)
        self._groups.setdefault(group, []).append(q)
        return q

    def build(self) -> RegisterMap:
        return RegisterMap(tuple(self._roles), tuple((k, tuple(v)) for k, v in self._groups.items()))


@dataclass(frozen=True)
class Circuit:
    qubit_count: int
    layers: tuple[Layer, ...]
    registers: RegisterMap
    model: str = "qac0"
    convention: DepthConvention = field(default_factory=DepthConvention)

    def __post_init__(self):
        layers = tuple(l if isinstance(l, Layer) else Layer(tuple(l)) for l in self.layers)
        object.__setattr__(self, "layers", layers)
        validate(self)

    @classmethod
    def empty(cls, registers: RegisterMap, model: str = "qac0",
              convention: DepthConvention | None = None) -> "Circuit":
        return cls(registers.qubit_count, (), registers, model, convention or DepthConvention())

    def gates(self) -> Iterator[Gate]:
        for layer in self.layers:
            yield from layer.gates

    @property
    def has_macros(self) -> bool:
        return any(g.is_macro for g in self.gates())

    @property
    def max_fanout_width(self) -> int:
        return max((len(g.targets) for g in self.gates() if isinstance(g, FanOut)), default=0)

    def replace(self, **kw) -> "Circuit":
        fields = dict(qubit_count=self.qubit_count, layers=self.layers, registers=self.registers,
                      model=self.model, convention=self.convention)
        fields.update(kw)
        return Circuit(**fields)


def validate(c: Circuit) -> None:
    if c.model not in MODELS:
        raise InvalidCircuit(f"unknown model {c.model!r}")
    if c.registers.qubit_count != c.qubit_count:
        raise InvalidCircuit(
            f"register map covers {c.registers.qubit_count} qubits, circuit has {c.qubit_count}")
    limit = c.convention.fanout_width_limit(c.qubit_count)
    for layer in c.layers:
        for g in layer.gates:
            for q in g.qubits:
                if q >= c.qubit_count:
                    raise InvalidGate(f"{type(g).__name__} touches qubit {q} >= {c.qubit_count}")
            if c.model == "qac0" and isinstance(g, FanOut) and len(g.targets) > limit:
                raise InvalidCircuit(
                    f"FanOut of width {len(g.targets)} exceeds the QAC0 log-width limit {limit}")


def fits_qac0(widths: Iterable[int], qubit_count: int, convention: DepthConvention) -> bool:
    limit = convention.fanout_width_limit(qubit_count)
    return all(w <= limit for w in widths)


def _check_compatible(a: Circuit, b: Circuit) -> None:
    if a.qubit_count != b.qubit_count:
        raise CompositionError(f"qubit counts differ: {a.qubit_count} vs {b.qubit_count}")
    if a.registers != b.registers:
        raise CompositionError("register maps differ")
    if a.convention != b.convention:
        raise CompositionError("depth conventions differ")


def _merge_model(*models: str) -> str:
    return "qac0f" if "qac0f" in models else "qac0"


def compose(*circuits: Circuit) -> Circuit:
    """Apply the circuits left to right."""
    if not circuits:
        raise CompositionError("nothing to compose")
    first = circuits[0]
    for c in circuits[1:]:
        _check_compatible(first, c)
    layers = tuple(l for c in circuits for l in c.layers)
    return first.replace(layers=layers, model=_merge_model(*(c.model for c in circuits)))


def inverse(c: Circuit) -> Circuit:
    layers = tuple(Layer(tuple(g.inverse() for g in layer.gates)) for layer in reversed(c.layers))
    return c.replace(layers=layers)


def append(c: Circuit, gate: Gate, new_layer: bool = True) -> Circuit:
    if new_layer or not c.layers:
        return c.replace(layers=c.layers + (Layer((gate,)),))
    last = c.layers[-1]
    return c.replace(layers=c.layers[:-1] + (Layer(last.gates + (gate,)),))


def layer_cost(layer: Layer, model: str, convention: DepthConvention) -> int:
    cost = 0
    for g in layer.gates:
        if g.is_macro:
            raise MacroNotExpanded(f"{type(g).__name__} must be expanded before measuring depth")
        if isinstance(g, GlobalCZ):
            cost = max(cost, 1 if len(g.support) >= 2 else 0)
        elif isinstance(g, FanOut):
            cost = max(cost, convention.fanout_depth if model == "qac0" else 1)
        elif isinstance(g, WeightOracle):
            cost = max(cost, convention.oracle_depth)
    return cost


def depth(c: Circuit) -> int:
    """Number of layers holding a multi-qubit gate, weighted by the model's conventions."""
    return sum(layer_cost(layer, c.model, c.convention) for layer in c.layers)


def gate_counts(c: Circuit) -> dict[str, int]:
    counts = Counter(g.kind for g in c.gates())
    return dict(sorted(counts.items()))


def ancilla_count(registers: RegisterMap) -> int:
    return sum(1 for r in registers.roles if r not in ("system", "output"))


@dataclass(frozen=True)
class ResourceReport:
    depth: int
    ancilla_count: int
    gate_counts: Mapping[str, int]
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.depth < 0 or self.ancilla_count < 0:
            raise ValueError("depth and ancilla count are non-negative")
        object.__setattr__(self, "gate_counts", dict(sorted(dict(self.gate_counts).items())))
        object.__setattr__(self, "notes", tuple(self.notes))

    def to_json(self) -> dict:
        return {"depth": self.depth, "ancilla_count": self.ancilla_count,
                "gate_counts": dict(self.gate_counts), "notes": list(self.notes)}


def resource_report(c: Circuit, notes: Sequence[str] = ()) -> ResourceReport:
    """Measure an expanded copy of ``c``; macro counts are reported too."""
    from .expand import expand_macros

    expanded = expand_macros(c)
    counts = gate_counts(expanded)
    macro_counts = Counter(g.kind for g in c.gates() if g.is_macro)
    for kind, n in macro_counts.items():
        counts[f"macro:{kind}"] = n
    return ResourceReport(depth(expanded), ancilla_count(c.registers), counts, tuple(notes))


class CircuitBuilder:
    """Single-owner helper that accumulates layers and allocates qubits."""

    def __init__(self, model: str = "qac0", convention: DepthConvention | None = None):
        self.alloc = RegisterAllocator()
        self.layers: list[list[Gate]] = []
        self.model = model
        self.convention = convention or DepthConvention()

    def layer(self, gates: Iterable[Gate]) -> None:
        gates = list(gates)
        if gates:
            self.layers.append(gates)

    def extend(self, layers: Iterable[Iterable[Gate]]) -> None:
        for l in layers:
            self.layer(l)

    def build(self, model: str | None = None) -> Circuit:
        regs = self.alloc.build()
        return Circuit(regs.qubit_count, tuple(Layer(tuple(l)) for l in self.layers), regs,
                       model or self.model, self.convention)


def merge_parallel(blocks: Sequence[Sequence[Sequence[Gate]]]) -> list[list[Gate]]:
    """Zip several layer lists into one, layer i holding every block's layer i."""
    width = max((len(b) for b in blocks), default=0)
    out: list[list[Gate]] = [[] for _ in range(width)]
    for b in blocks:
        for i, layer in enumerate(b):
            out[i].extend(layer)
    return out


def inverse_layers(layers: Sequence[Sequence[Gate]]) -> list[list[Gate]]:
    return [[g.inverse() for g in layer] for layer in reversed(layers)]
