"""THRESHOLD_k and EXACT_k bit circuits built from the partition recursion.

The recursion is laid out as a tree: every node owns a fresh ancilla and is
read exactly once by its parent, so nodes never compete for a qubit inside a
layer.  Leaves (NORs over input subsets) read the inputs through FanOut
copies.  Layers follow a schedule that depends only on the node's threshold,
never on n, which keeps depth flat in n:

    F(0) = 1, F(1) = 3, F(t) = F(t-1) + 3 for t >= 2.

A node TH_t with t >= 2 evaluates its pair ANDs at F(t-1)+1, its clause ORs
at F(t-1)+2 and itself at F(t).  TH_1 has no pair terms: ORs at 2, AND at 3.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..boolean import partition_sets
from ..circuit import (
    Circuit,
    CircuitBuilder,
    DepthConvention,
    RegisterAllocator,
    fits_qac0,
    inverse_layers,
    resource_report,
)
from ..errors import ResourceLimit, Unsupported
from ..gates import FanOut, Gate, MultiToffoli, x
from ..simulator.statevector import default_max_qubits

MAX_K = 4
# Hard ceiling on qubits allocated by one network; the classical tracking
# simulator copes with many ancillas but not unbounded ones.
MAX_NETWORK_QUBITS = 200_000

ONE = "one"


def schedule(t: int) -> int:
    """Layer at which a TH_t node is evaluated."""
    if t <= 0:
        return 1
    if t == 1:
        return 3
    return schedule(t - 1) + 3


@dataclass
class _Node:
    op: str  # "nor" | "or" | "and"
    layer: int
    inputs: list = field(default_factory=list)  # input index j, or a _Node
    qubit: int = -1


class Network:
    """A forest of threshold trees over one input register."""

    def __init__(self, n: int):
        self.n = n
        self.nodes: list[_Node] = []

    def _new(self, op: str, layer: int, inputs: list) -> _Node:
        node = _Node(op, layer, inputs)
        self.nodes.append(node)
        if len(self.nodes) > MAX_NETWORK_QUBITS:
            raise ResourceLimit(f"threshold network exceeds {MAX_NETWORK_QUBITS} nodes",
                                {"nodes": len(self.nodes), "limit": MAX_NETWORK_QUBITS})
        return node

    def threshold(self, subset: Sequence[int], t: int):
        """Node computing TH_t over the inputs in ``subset``, or ONE."""
        subset = tuple(subset)
        if t >= len(subset):
            return ONE
        if t == 0:
            return self._new("nor", 1, list(subset))
        clauses = []
        for p0, p1 in partition_sets(len(subset)):
            s0 = tuple(subset[p] for p in p0)
            s1 = tuple(subset[p] for p in p1)
            # NOR of an empty side, or a pair of constant-1 thresholds,
            # makes the clause constant 1; drop it before building anything
            if not s0 or not s1:
                continue
            if any(kk >= len(s0) and t - kk >= len(s1) for kk in range(1, t)):
                continue
            terms: list = [self.threshold(s0, 0), self.threshold(s1, 0)]
            for kk in range(1, t):
                live = [h for h in (self.threshold(s0, kk), self.threshold(s1, t - kk)) if h is not ONE]
                terms.append(self._new("and", schedule(t - 1) + 1, live))
            or_layer = 2 if t == 1 else schedule(t - 1) + 2
            clauses.append(self._new("or", or_layer, terms))
        if not clauses:
            return ONE
        return self._new("and", schedule(t), clauses)

    # ------------------------------------------------------------ emission
    def reads(self) -> list[int]:
        counts = [0] * self.n
        for node in self.nodes:
            if node.op == "nor":
                for j in node.inputs:
                    counts[j] += 1
        return counts

    def allocate(self, alloc: RegisterAllocator, targets: dict[int, int], group: str) -> None:
        """Give every node a qubit; ``targets`` maps id(node) to a preset qubit."""
        for node in self.nodes:
            node.qubit = targets.get(id(node), -1)
            if node.qubit < 0:
                node.qubit = alloc.fresh(group)

    def compute_layers(self, inputs: Sequence[int], alloc: RegisterAllocator, exclude: set[int],
                       copy_group: str) -> list[list[Gate]]:
        """Layer 0 copies inputs; layer L evaluates nodes scheduled at L.

        Nodes whose id is in ``exclude`` are left out (they are emitted by the
        caller between compute and uncompute).
        """
        counts = self.reads()
        copies: list[list[int]] = []
        layer0: list[Gate] = []
        for j, r in enumerate(counts):
            extra = [alloc.fresh(copy_group) for _ in range(max(0, r - 1))]
            copies.append([inputs[j]] + extra)
            if extra:
                layer0.append(FanOut(inputs[j], tuple(extra)))
        cursor = [0] * self.n
        top = max((node.layer for node in self.nodes), default=0)
        layers: list[list[Gate]] = [layer0] + [[] for _ in range(top)]
        for node in self.nodes:
            if node.op == "nor":
                qs = []
                for j in node.inputs:
                    qs.append(copies[j][cursor[j]])
                    cursor[j] += 1
                node.inputs = qs
        for node in self.nodes:
            if id(node) in exclude:
                continue
            gate, pre = node_gates(node)
            layers[node.layer].append(gate)
            layers[0].extend(pre)
        return layers


def node_gates(node: _Node) -> tuple[Gate, list[Gate]]:
    """(main gate, single-qubit preparation for layer 0)."""
    if node.op == "nor":
        return MultiToffoli(tuple((q, False) for q in node.inputs), node.qubit), []
    qs = [i.qubit for i in node.inputs]
    if node.op == "and":
        return MultiToffoli(tuple((q, True) for q in qs), node.qubit), []
    # OR = NOT(NOR): preset the target to 1 and clear it when every input is 0
    return MultiToffoli(tuple((q, False) for q in qs), node.qubit), [x(node.qubit)]


def _check_cap(n: int, max_qubits: int | None) -> None:
    cap = default_max_qubits() if max_qubits is None else max_qubits
    if n > cap:
        raise ResourceLimit(f"{n} input qubits exceed the simulation cap {cap}",
                            {"inputs": n, "cap": cap})


def _check_k(k: int) -> None:
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > MAX_K:
        raise Unsupported(
            f"k={k} exceeds the supported constant-weight range k <= {MAX_K}; the partition "
            "recursion needs ancillas growing like n^(k+1), so weights that grow with n cannot "
            "be reached in constant depth this way")


@dataclass(frozen=True)
class NetworkLayers:
    layers: list
    fanout_widths: tuple[int, ...]


def threshold_network_layers(alloc: RegisterAllocator, inputs: Sequence[int], k: int, target: int,
                             *, group: str = "work", copy_group: str = "copies") -> NetworkLayers:
    """Layers XOR-ing TH_k(inputs) into ``target`` with inputs and ancillas restored."""
    _check_k(k)
    net = Network(len(inputs))
    root = net.threshold(range(len(inputs)), k)
    if root is ONE:
        return NetworkLayers([[x(target)]], ())
    net.allocate(alloc, {id(root): target}, group)
    compute = net.compute_layers(inputs, alloc, {id(root)}, copy_group)
    gate, pre = node_gates(root)
    middle = [[g for g in pre], [gate], [g for g in pre]]
    layers = compute + middle + inverse_layers(compute)
    return NetworkLayers([l for l in layers if l], _widths(compute))


def exact_network_layers(alloc: RegisterAllocator, inputs: Sequence[int], k: int, target: int,
                         *, group: str = "work", copy_group: str = "copies") -> NetworkLayers:
    """Layers XOR-ing EXACT_k(inputs) = TH_k AND NOT TH_{k-1} into ``target``."""
    _check_k(k)
    n = len(inputs)
    if k > n:
        return NetworkLayers([], ())
    if k == 0:
        return threshold_network_layers(alloc, inputs, 0, target, group=group, copy_group=copy_group)
    net = Network(n)
    hi = net.threshold(range(n), k)
    lo = net.threshold(range(n), k - 1)
    net.allocate(alloc, {}, group)
    compute = net.compute_layers(inputs, alloc, set(), copy_group)
    controls = []
    if hi is not ONE:
        controls.append((hi.qubit, True))
    controls.append((lo.qubit, False))  # lo is never ONE since k - 1 < n
    middle = [[MultiToffoli(tuple(controls), target)]]
    layers = compute + middle + inverse_layers(compute)
    return NetworkLayers([l for l in layers if l], _widths(compute))


def _widths(layers) -> tuple[int, ...]:
    return tuple(len(g.targets) for l in layers for g in l if isinstance(g, FanOut))


def _bit_circuit(n: int, k: int, exact: bool, convention: DepthConvention | None,
                 max_qubits: int | None) -> Circuit:
    _check_k(k)
    _check_cap(n, max_qubits)
    conv = convention or DepthConvention()
    b = CircuitBuilder("qac0", conv)
    xs = b.alloc.register("x", n, "system")
    out = b.alloc.register("out", 1, "output")[0]
    build = exact_network_layers if exact else threshold_network_layers
    net = build(b.alloc, xs, k, out)
    b.extend(net.layers)
    model = "qac0" if fits_qac0(net.fanout_widths, b.alloc.count, conv) else "qac0f"
    return b.build(model)


def synth_threshold_circuit(n: int, k: int, *, convention: DepthConvention | None = None,
                            max_qubits: int | None = None) -> Circuit:
    """Circuit writing TH_k(x) into the ``out`` register.

    Marked ``qac0f`` when some input copy FanOut is wider than the QAC0
    log-width bound.
    """
    return _bit_circuit(n, k, False, convention, max_qubits)


def synth_exact_circuit(n: int, k: int, *, convention: DepthConvention | None = None,
                        max_qubits: int | None = None) -> Circuit:
    """Circuit writing EXACT_k(x) into the ``out`` register."""
    return _bit_circuit(n, k, True, convention, max_qubits)


def network_notes(c: Circuit) -> list[str]:
    notes = []
    if c.model == "qac0f":
        notes.append("input copies need FanOut wider than the QAC0 log-width bound")
    return notes


def threshold_report(c: Circuit):
    return resource_report(c, network_notes(c))
