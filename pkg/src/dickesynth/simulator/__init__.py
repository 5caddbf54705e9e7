"""Dense, hybrid and basis-batch simulators plus state measures."""

from __future__ import annotations

from typing import Mapping, Sequence

from ..circuit import Circuit
from ..expand import expand_macros
from .classical import BasisBatch, all_inputs, is_classical
from .hybrid import HybridState
from .statevector import (
    CAP_ENV,
    FidelityResult,
    StateVector,
    apply_circuit,
    apply_gate,
    bitstring,
    default_max_qubits,
    fidelity,
    register_distribution as _dense_distribution,
    reduced_overlap as _dense_overlap,
    run_dense,
)

State = StateVector | HybridState


def simulate(circuit: Circuit, *, backend: str = "auto", expand: bool = True,
             max_qubits: int | None = None) -> State:
    """Run ``circuit`` on |0...0>.

    ``dense`` needs the full register under the cap; ``hybrid`` only needs the
    working set.  ``auto`` picks dense for up to 14 qubits.  ``expand`` runs
    the primitive circuit rather than the macro-level one.
    """
    c = expand_macros(circuit) if expand else circuit
    if backend == "auto":
        backend = "dense" if circuit.qubit_count <= 14 else "hybrid"
    if backend == "dense":
        return run_dense(c, max_qubits=max_qubits)
    if backend == "hybrid":
        return HybridState(c.qubit_count, max_dense=max_qubits).apply_circuit(c)
    raise ValueError(f"unknown backend {backend!r}")


def reduced_overlap(state: State, register: Sequence[int], target: StateVector) -> FidelityResult:
    if isinstance(state, HybridState):
        return FidelityResult(min(state.reduced_overlap(register, target), 1.0 + 1e-12), "reduced_register")
    return _dense_overlap(state, register, target)


def conditional_overlap(state: State, register: Sequence[int], target: StateVector,
                        condition: Mapping[int, int]) -> float:
    """Overlap of the register with ``target`` after post-selecting ``condition``."""
    hs = state if isinstance(state, HybridState) else HybridState.from_amplitudes(
        state.qubit_count, list(range(state.qubit_count)), state.amplitudes, max_dense=state.qubit_count)
    prob = hs.probability(condition)
    if prob <= 0:
        return 0.0
    return hs.reduced_overlap(register, target, condition) / prob


def register_distribution(state: State, register: Sequence[int]) -> dict[str, float]:
    if isinstance(state, HybridState):
        return state.register_distribution(register)
    return _dense_distribution(state, register)


def probability(state: State, condition: Mapping[int, int]) -> float:
    if isinstance(state, HybridState):
        return state.probability(condition)
    dist = register_distribution(state, list(condition))
    key = "".join(str(int(v)) for v in condition.values())
    return dist.get(key, 0.0)


def product_fidelity(state: State, register: Sequence[int], target: StateVector) -> float:
    """Fidelity with ``target`` on ``register`` and |0> on every other qubit."""
    if isinstance(state, HybridState):
        return state.product_fidelity(register, target)
    hs = HybridState.from_amplitudes(state.qubit_count, list(range(state.qubit_count)),
                                     state.amplitudes, max_dense=state.qubit_count)
    return hs.product_fidelity(register, target)


def norm(state: State) -> float:
    return state.norm()


__all__ = [
    "BasisBatch", "CAP_ENV", "FidelityResult", "HybridState", "StateVector", "all_inputs",
    "apply_circuit", "apply_gate", "bitstring", "conditional_overlap", "default_max_qubits",
    "fidelity", "is_classical", "norm", "probability", "product_fidelity", "reduced_overlap",
    "register_distribution", "run_dense", "simulate",
]
