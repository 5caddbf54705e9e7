"""Dense statevector simulation of primitive circuits."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..circuit import Circuit
from ..errors import DimensionError, InvalidGate, InvalidRegister, MacroNotExpanded, ResourceLimit
from ..gates import FanOut, Gate, GlobalCZ, SingleQubit, WeightOracle

CAP_ENV = "DICKESYNTH_MAX_QUBITS"
NORM_TOL = 1e-10


def default_max_qubits() -> int:
    raw = os.environ.get(CAP_ENV)
    return int(raw) if raw else 24


def check_cap(qubits: int, cap: int | None = None, what: str = "state") -> None:
    cap = default_max_qubits() if cap is None else cap
    if qubits > cap:
        raise ResourceLimit(f"{what} needs {qubits} dense qubits, cap is {cap}",
                            {"qubits": qubits, "cap": cap})


class StateVector:
    """Unit-norm amplitudes over 2**N basis states; bit q of the index is qubit q."""

    __slots__ = ("amplitudes", "qubit_count")

    def __init__(self, amplitudes, qubit_count: int | None = None, *, max_qubits: int | None = None,
                 check_norm: bool = True):
        amps = np.ascontiguousarray(np.asarray(amplitudes, dtype=np.complex128).reshape(-1))
        n = int(round(np.log2(len(amps)))) if qubit_count is None else qubit_count
        if len(amps) != 1 << n:
            raise DimensionError(f"{len(amps)} amplitudes do not describe {n} qubits")
        check_cap(n, max_qubits)
        if check_norm and abs(np.linalg.norm(amps) - 1) > NORM_TOL:
            raise DimensionError(f"state norm {np.linalg.norm(amps)} differs from 1")
        self.amplitudes = amps
        self.qubit_count = n

    @classmethod
    def zero(cls, n: int, max_qubits: int | None = None) -> "StateVector":
        return cls.basis(n, 0, max_qubits)

    @classmethod
    def basis(cls, n: int, index: int, max_qubits: int | None = None) -> "StateVector":
        check_cap(n, max_qubits)
        amps = np.zeros(1 << n, dtype=np.complex128)
        amps[index] = 1
        return cls(amps, n, max_qubits=max_qubits)

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.qubit_count, max_qubits=64, check_norm=False)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        """View as an N-axis tensor; axis ``N-1-q`` is qubit ``q``."""
        return self.amplitudes.reshape((2,) * self.qubit_count) if self.qubit_count else self.amplitudes

    def to_bytes(self) -> bytes:
        return self.amplitudes.astype("<c16").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "StateVector":
        return cls(np.frombuffer(data, dtype="<c16").astype(np.complex128))

    def __repr__(self) -> str:
        return f"StateVector(qubits={self.qubit_count}, norm={self.norm():.12f})"


# ------------------------------------------------------------------ kernels

def _apply_single(psi: np.ndarray, n: int, q: int, m: np.ndarray) -> None:
    v = psi.reshape(1 << (n - q - 1), 2, 1 << q)
    if m[0, 1] == 0 and m[1, 0] == 0:
        if m[0, 0] != 1:
            v[:, 0, :] *= m[0, 0]
        if m[1, 1] != 1:
            v[:, 1, :] *= m[1, 1]
        return
    a0 = v[:, 0, :].copy()
    a1 = v[:, 1, :]
    v[:, 0, :] = m[0, 0] * a0 + m[0, 1] * a1
    v[:, 1, :] = m[1, 0] * a0 + m[1, 1] * a1


def _apply_gcz(psi: np.ndarray, n: int, support: Sequence[int]) -> None:
    t = psi.reshape((2,) * n)
    idx = [slice(None)] * n
    for q in support:
        idx[n - 1 - q] = 1
    t[tuple(idx)] *= -1


def _apply_fanout(psi: np.ndarray, n: int, control: int, targets: Sequence[int]) -> None:
    t = psi.reshape((2,) * n)
    c_axis = n - 1 - control
    idx = [slice(None)] * n
    idx[c_axis] = 1
    idx = tuple(idx)
    axes = [(n - 1 - q) - (1 if (n - 1 - q) > c_axis else 0) for q in targets]
    t[idx] = np.flip(t[idx], axis=axes).copy()


def _apply_weight(psi: np.ndarray, n: int, gate: WeightOracle) -> None:
    index = np.arange(1 << n, dtype=np.int64)
    count = np.zeros(1 << n, dtype=np.int64)
    for q in gate.inputs:
        count += (index >> q) & 1
    flip = np.isin(count, gate.weights)
    src = index ^ (flip.astype(np.int64) << gate.target)
    psi[:] = psi[src]


def apply_gate_inplace(psi: np.ndarray, n: int, gate: Gate) -> None:
    if gate.is_macro:
        raise MacroNotExpanded(f"{type(gate).__name__} must be expanded before dense simulation")
    for q in gate.qubits:
        if q >= n:
            raise InvalidGate(f"{type(gate).__name__} touches qubit {q} outside {n} qubits")
    if isinstance(gate, SingleQubit):
        _apply_single(psi, n, gate.target, gate.array)
    elif isinstance(gate, GlobalCZ):
        _apply_gcz(psi, n, gate.support)
    elif isinstance(gate, FanOut):
        _apply_fanout(psi, n, gate.control, gate.targets)
    elif isinstance(gate, WeightOracle):
        _apply_weight(psi, n, gate)
    else:  # pragma: no cover
        raise InvalidGate(f"unknown gate {gate!r}")


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    out = state.copy()
    apply_gate_inplace(out.amplitudes, out.qubit_count, gate)
    return out


def apply_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    if state.qubit_count != circuit.qubit_count:
        raise DimensionError(f"state has {state.qubit_count} qubits, circuit {circuit.qubit_count}")
    if circuit.has_macros:
        raise MacroNotExpanded("expand macros before dense simulation")
    out = state.copy()
    for layer in circuit.layers:
        for g in layer.gates:
            apply_gate_inplace(out.amplitudes, out.qubit_count, g)
    return out


def run_dense(circuit: Circuit, initial: StateVector | None = None,
              max_qubits: int | None = None) -> StateVector:
    from ..expand import expand_macros

    state = initial if initial is not None else StateVector.zero(circuit.qubit_count, max_qubits)
    return apply_circuit(state, expand_macros(circuit))


# ------------------------------------------------------------------ measures

@dataclass(frozen=True)
class FidelityResult:
    value: float
    kind: str  # "full_state" | "reduced_register"

    def __post_init__(self):
        if not -1e-12 <= self.value <= 1 + 1e-12:
            raise ValueError(f"fidelity {self.value} outside [0, 1]")

    def __float__(self) -> float:
        return self.value


def fidelity(a: StateVector, b: StateVector) -> FidelityResult:
    if a.qubit_count != b.qubit_count:
        raise DimensionError("fidelity needs equal qubit counts")
    v = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    return FidelityResult(float(min(max(v, 0.0), 1.0 + 1e-12)), "full_state")


def _register_matrix(state: StateVector, register: Sequence[int]) -> np.ndarray:
    """Rows indexed by the register value (bit i = register[i]), columns by the rest."""
    n = state.qubit_count
    register = list(register)
    if len(set(register)) != len(register) or any(not 0 <= q < n for q in register):
        raise InvalidRegister(f"register {register} is not a subset of {n} qubits")
    rest = [q for q in range(n - 1, -1, -1) if q not in set(register)]
    axes = [n - 1 - q for q in reversed(register)] + [n - 1 - q for q in rest]
    t = np.transpose(state.tensor(), axes) if n else state.amplitudes
    return t.reshape(1 << len(register), -1)


def reduced_overlap(state: StateVector, register: Sequence[int], target: StateVector) -> FidelityResult:
    if target.qubit_count != len(register):
        raise DimensionError("target must live on exactly the register qubits")
    m = _register_matrix(state, register)
    proj = target.amplitudes.conj() @ m
    v = float(np.sum(np.abs(proj) ** 2))
    return FidelityResult(min(v, 1.0 + 1e-12), "reduced_register")


def bitstring(value: int, width: int) -> str:
    """Character i is bit i of ``value`` (register order, not numeric order)."""
    return "".join("1" if (value >> i) & 1 else "0" for i in range(width))


def register_distribution(state: StateVector, register: Sequence[int]) -> dict[str, float]:
    m = _register_matrix(state, register)
    probs = np.sum(np.abs(m) ** 2, axis=1)
    return {bitstring(v, len(register)): float(p) for v, p in enumerate(probs) if p > 0}
