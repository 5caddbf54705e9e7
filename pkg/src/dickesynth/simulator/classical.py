"""Batch evaluation of permutation-with-phase circuits on basis states.

Used for truth tables: every input of a Boolean circuit is pushed through the
macro-level circuit at once, one row per input.  Only gates that map basis
states to basis states (up to phase) are accepted.
"""

from __future__ import annotations

import numpy as np

from ..circuit import Circuit
from ..errors import DimensionError, Unsupported
from ..gates import ControlledXor, FanOut, Gate, GlobalCZ, MultiToffoli, SingleQubit, WeightOracle


def gate_is_classical(g: Gate) -> bool:
    if isinstance(g, SingleQubit):
        return g.is_diagonal or g.is_antidiagonal
    return isinstance(g, (GlobalCZ, FanOut, MultiToffoli, ControlledXor, WeightOracle))


def is_classical(circuit: Circuit) -> bool:
    return all(gate_is_classical(g) for g in circuit.gates())


class BasisBatch:
    def __init__(self, bits: np.ndarray):
        self.bits = np.array(bits, dtype=bool)
        if self.bits.ndim != 2:
            raise DimensionError("bits must be a (batch, qubits) array")
        self.phase = np.ones(len(self.bits), dtype=np.complex128)

    @property
    def qubit_count(self) -> int:
        return self.bits.shape[1]

    def apply_gate(self, g: Gate) -> None:
        b = self.bits
        if isinstance(g, SingleQubit):
            m = g.array
            col = b[:, g.target]
            if g.is_diagonal:
                self.phase *= np.where(col, m[1, 1], m[0, 0])
            elif g.is_antidiagonal:
                self.phase *= np.where(col, m[0, 1], m[1, 0])
                b[:, g.target] = ~col
            else:
                raise Unsupported(f"{g.label or 'single-qubit gate'} on qubit {g.target} is not classical")
        elif isinstance(g, GlobalCZ):
            self.phase[np.all(b[:, list(g.support)], axis=1)] *= -1
        elif isinstance(g, FanOut):
            c = b[:, g.control].copy()
            for t in g.targets:
                b[:, t] ^= c
        elif isinstance(g, MultiToffoli):
            cond = np.ones(len(b), dtype=bool)
            for q, positive in g.controls:
                cond &= b[:, q] == positive
            b[:, g.target] ^= cond
        elif isinstance(g, ControlledXor):
            c = b[:, g.control].copy()
            for s, d in g.pairs:
                b[:, d] ^= c & b[:, s]
        elif isinstance(g, WeightOracle):
            count = b[:, list(g.inputs)].sum(axis=1)
            b[:, g.target] ^= np.isin(count, g.weights)
        else:
            raise Unsupported(f"{type(g).__name__} is not a basis-state permutation")

    def apply_circuit(self, circuit: Circuit) -> "BasisBatch":
        if circuit.qubit_count != self.qubit_count:
            raise DimensionError("batch width differs from circuit qubit count")
        for layer in circuit.layers:
            for g in layer.gates:
                self.apply_gate(g)
        return self


def all_inputs(n: int) -> np.ndarray:
    """Row x holds the bits of integer x, bit i in column i."""
    xs = np.arange(1 << n, dtype=np.int64)
    return ((xs[:, None] >> np.arange(n)) & 1).astype(bool)
