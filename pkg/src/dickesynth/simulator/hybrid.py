"""Exact simulation with classically tracked qubits.

The state is stored as

    sum_i amp[i] |dense bits = i> |tracked bits = table[i]> |0 ... 0>

i.e. a dense amplitude array over a working set of qubits, plus, for every
dense basis index, a row of classical bits for the tracked qubits.  Qubits in
neither set are exactly |0>.  Classical reversible gates (FanOut, Toffoli,
weight oracles, X, diagonal phases) only edit the table or permute indices.
A gate that creates superposition on a qubit first moves it into the dense
set, together with any tracked qubit whose value would otherwise become
ambiguous; once a dense qubit is again a function of the others it is moved
back.  Nothing is approximated except that amplitudes with
|a|^2 <= ``tol`` are treated as zero when deciding structure; their total
weight is accumulated in ``discarded``.

Circuits that hold hundreds of ancillas as functions of a small input
register (threshold networks, block flags) simulate with a dense array no
larger than the input register.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

import numpy as np

from ..circuit import Circuit
from ..errors import DimensionError, InvalidGate, InvalidRegister, ResourceLimit
from ..gates import (
    ControlledXor,
    FanOut,
    Gate,
    GlobalCZ,
    MultiToffoli,
    ProductReflection,
    SingleQubit,
    WeightOracle,
)
from .statevector import StateVector, bitstring, default_max_qubits


class HybridState:
    def __init__(self, qubit_count: int, *, max_dense: int | None = None, tol: float = 1e-26):
        self.qubit_count = qubit_count
        self.max_dense = default_max_qubits() if max_dense is None else max_dense
        self.tol = tol
        self.dense: list[int] = []
        self.amp = np.ones(1, dtype=np.complex128)
        self.cols: list[int] = []
        self.table = np.zeros((1, 0), dtype=bool)
        self.discarded = 0.0
        self.peak_dense = 0
        self._reindex()

    # -------------------------------------------------------------- set-up
    @classmethod
    def from_amplitudes(cls, qubit_count: int, qubits: Sequence[int], amplitudes,
                        *, max_dense: int | None = None) -> "HybridState":
        """State with ``amplitudes`` on ``qubits`` (bit i = qubits[i]) and |0> elsewhere."""
        s = cls(qubit_count, max_dense=max_dense)
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        if len(amps) != 1 << len(qubits):
            raise DimensionError("amplitude count does not match the qubit list")
        if len(qubits) > s.max_dense:
            raise ResourceLimit(f"{len(qubits)} dense qubits exceed cap {s.max_dense}",
                                {"dense": len(qubits), "cap": s.max_dense})
        s.dense = list(qubits)
        s.amp = amps.copy()
        s.table = np.zeros((len(amps), 0), dtype=bool)
        s.peak_dense = len(qubits)
        s._reindex()
        return s

    @classmethod
    def basis(cls, qubit_count: int, ones: Iterable[int] = (), **kw) -> "HybridState":
        s = cls(qubit_count, **kw)
        for q in ones:
            s._ensure_col(q)
            s.table[:, s._cpos[q]] = True
        return s

    def copy(self) -> "HybridState":
        other = HybridState(self.qubit_count, max_dense=self.max_dense, tol=self.tol)
        other.dense = list(self.dense)
        other.amp = self.amp.copy()
        other.cols = list(self.cols)
        other.table = self.table.copy()
        other.discarded = self.discarded
        other.peak_dense = self.peak_dense
        other._reindex()
        return other

    # -------------------------------------------------------------- internals
    def _reindex(self) -> None:
        self._dpos = {q: i for i, q in enumerate(self.dense)}
        self._cpos = {q: i for i, q in enumerate(self.cols)}
        self._index = np.arange(len(self.amp), dtype=np.int64)

    def _bit(self, q: int) -> np.ndarray:
        if q in self._dpos:
            return ((self._index >> self._dpos[q]) & 1).astype(bool)
        if q in self._cpos:
            return self.table[:, self._cpos[q]].copy()
        return np.zeros(len(self.amp), dtype=bool)

    def _known_zero(self, q: int) -> bool:
        return q not in self._dpos and q not in self._cpos

    def _ensure_col(self, q: int) -> None:
        if q in self._dpos or q in self._cpos:
            return
        self.cols.append(q)
        self.table = np.concatenate([self.table, np.zeros((len(self.amp), 1), dtype=bool)], axis=1)
        self._cpos[q] = len(self.cols) - 1

    def _nonzero(self) -> np.ndarray:
        return (self.amp.real ** 2 + self.amp.imag ** 2) > self.tol

    def _promote(self, q: int) -> None:
        if q in self._dpos:
            return
        if len(self.dense) + 1 > self.max_dense:
            raise ResourceLimit(
                f"simulation needs more than {self.max_dense} dense qubits",
                {"dense": len(self.dense) + 1, "cap": self.max_dense, "tracked": len(self.cols)})
        size = len(self.amp)
        if q in self._cpos:
            c = self._cpos[q]
            vals = self.table[:, c].astype(np.int64)
            self.table = np.delete(self.table, c, axis=1)
            self.cols.pop(c)
        else:
            vals = np.zeros(size, dtype=np.int64)
        amp = np.zeros(2 * size, dtype=np.complex128)
        amp[self._index + vals * size] = self.amp
        self.amp = amp
        self.table = np.concatenate([self.table, self.table], axis=0)
        self.dense.append(q)
        self.peak_dense = max(self.peak_dense, len(self.dense))
        self._reindex()

    def _demote(self, q: int) -> bool:
        """Move dense qubit ``q`` back to the table if it is a function of the rest."""
        if q not in self._dpos:
            return False
        p = self._dpos[q]
        v = self.amp.reshape(-1, 2, 1 << p)
        w = v.real ** 2 + v.imag ** 2
        small = np.minimum(w[:, 0, :], w[:, 1, :])
        if small.max(initial=0.0) > self.tol:
            return False
        one = w[:, 1, :] > w[:, 0, :]
        amp = np.where(one, v[:, 1, :], v[:, 0, :]).reshape(-1)
        ncol = self.table.shape[1]
        lead = len(self.amp) >> (p + 1)
        t = self.table.reshape(lead, 2, 1 << p, ncol)
        table = np.where(one[..., None], t[:, 1], t[:, 0]).reshape(lead << p, ncol)
        self.discarded += float(small.sum())
        self.amp = np.ascontiguousarray(amp)
        self.table = np.ascontiguousarray(table)
        self.dense.pop(p)
        if one.any():
            self.cols.append(q)
            self.table = np.concatenate([self.table, one.reshape(-1, 1)], axis=1)
        self._reindex()
        return True

    def _prune(self, qubits: Iterable[int]) -> None:
        drop = []
        nz = None
        for q in qubits:
            if q in self._cpos:
                if nz is None:
                    nz = self._nonzero()
                if not np.any(self.table[:, self._cpos[q]] & nz):
                    drop.append(self._cpos[q])
        if drop:
            self.table = np.delete(self.table, drop, axis=1)
            for c in sorted(drop, reverse=True):
                self.cols.pop(c)
            self._reindex()

    def _permute(self, flip: np.ndarray) -> None:
        dst = self._index ^ flip
        amp = np.empty_like(self.amp)
        amp[dst] = self.amp
        table = np.empty_like(self.table)
        table[dst] = self.table
        self.amp, self.table = amp, table

    def _mix(self, q: int, m: np.ndarray) -> None:
        self._promote(q)
        while True:
            p = self._dpos[q]
            v = self.amp.reshape(-1, 2, 1 << p)
            w = v.real ** 2 + v.imag ** 2
            nz0, nz1 = w[:, 0, :] > self.tol, w[:, 1, :] > self.tol
            ncol = self.table.shape[1]
            if not ncol:
                break
            t = self.table.reshape(v.shape[0], 2, 1 << p, ncol)
            clash = ((t[:, 0] != t[:, 1]) & (nz0 & nz1)[..., None]).any(axis=(0, 1))
            if not clash.any():
                break
            for c in [self.cols[i] for i in np.flatnonzero(clash)]:
                self._promote(c)
        if self.table.shape[1]:
            t = self.table.reshape(v.shape[0], 2, 1 << p, self.table.shape[1])
            row = np.where(nz0[..., None], t[:, 0], t[:, 1])
            t[:, 0] = row
            t[:, 1] = row
        a0 = v[:, 0, :].copy()
        a1 = v[:, 1, :].copy()
        v[:, 0, :] = m[0, 0] * a0 + m[0, 1] * a1
        v[:, 1, :] = m[1, 0] * a0 + m[1, 1] * a1
        self._demote(q)

    def _classical_write(self, targets_conds: Sequence[tuple[int, np.ndarray]]) -> None:
        """XOR each condition array into its target (conditions read beforehand)."""
        flip = None
        for q, cond in targets_conds:
            if not cond.any():
                continue
            if q in self._dpos:
                if flip is None:
                    flip = np.zeros(len(self.amp), dtype=np.int64)
                flip |= cond.astype(np.int64) << self._dpos[q]
            else:
                self._ensure_col(q)
                self.table[:, self._cpos[q]] ^= cond
        if flip is not None:
            self._permute(flip)
        touched = [q for q, _ in targets_conds]
        self._prune(touched)
        for q in touched:
            if q in self._dpos:
                self._demote(q)

    def _prepare_controls(self, targets: Iterable[int], controls: Iterable[int]) -> None:
        """If a dense target will be flipped, its controls must be dense too."""
        if any(t in self._dpos for t in targets):
            for c in controls:
                if c in self._cpos:
                    self._promote(c)

    # -------------------------------------------------------------- gates
    def apply_gate(self, g: Gate) -> "HybridState":
        for q in g.qubits:
            if q >= self.qubit_count:
                raise InvalidGate(f"{type(g).__name__} touches qubit {q} >= {self.qubit_count}")
        if isinstance(g, SingleQubit):
            self._single(g)
        elif isinstance(g, GlobalCZ):
            if any(self._known_zero(q) for q in g.support):
                return self
            mask = np.ones(len(self.amp), dtype=bool)
            for q in g.support:
                mask &= self._bit(q)
            self.amp[mask] *= -1
        elif isinstance(g, FanOut):
            if self._known_zero(g.control):
                return self
            self._prepare_controls(g.targets, [g.control])
            c = self._bit(g.control)
            self._classical_write([(t, c) for t in g.targets])
        elif isinstance(g, MultiToffoli):
            self._prepare_controls([g.target], [q for q, _ in g.controls])
            cond = np.ones(len(self.amp), dtype=bool)
            for q, positive in g.controls:
                cond &= self._bit(q) == positive
            self._classical_write([(g.target, cond)])
        elif isinstance(g, ControlledXor):
            if self._known_zero(g.control):
                return self
            dense_pairs = [(s, d) for s, d in g.pairs if d in self._dpos]
            if dense_pairs:
                for q in [g.control] + [s for s, _ in dense_pairs]:
                    if q in self._cpos:
                        self._promote(q)
            c = self._bit(g.control)
            self._classical_write([(d, c & self._bit(s)) for s, d in g.pairs])
        elif isinstance(g, WeightOracle):
            self._prepare_controls([g.target], g.inputs)
            count = np.zeros(len(self.amp), dtype=np.int64)
            for q in g.inputs:
                count += self._bit(q)
            self._classical_write([(g.target, np.isin(count, g.weights))])
        elif isinstance(g, ProductReflection):
            from ..expand import expand_product_reflection

            for layer in expand_product_reflection(g):
                for sub in layer:
                    self.apply_gate(sub)
        else:  # pragma: no cover
            raise InvalidGate(f"unsupported gate {g!r}")
        return self

    def _single(self, g: SingleQubit) -> None:
        m = g.array
        q = g.target
        if g.is_diagonal:
            b = self._bit(q)
            self.amp *= np.where(b, m[1, 1], m[0, 0])
        elif g.is_antidiagonal:
            b = self._bit(q)
            self.amp *= np.where(b, m[0, 1], m[1, 0])
            if q in self._dpos:
                self._permute(np.full(len(self.amp), 1 << self._dpos[q], dtype=np.int64))
            else:
                self._ensure_col(q)
                self.table[:, self._cpos[q]] ^= True
                self._prune([q])
        else:
            self._mix(q, m)

    def apply_circuit(self, circuit: Circuit) -> "HybridState":
        if circuit.qubit_count != self.qubit_count:
            raise DimensionError(f"state has {self.qubit_count} qubits, circuit {circuit.qubit_count}")
        for layer in circuit.layers:
            for g in layer.gates:
                self.apply_gate(g)
        return self

    # -------------------------------------------------------------- readout
    def norm(self) -> float:
        return float(np.linalg.norm(self.amp))

    def terms(self) -> tuple[np.ndarray, np.ndarray]:
        """Non-negligible basis terms as (bits[R, N], amplitudes[R])."""
        nz = self._nonzero()
        idx = self._index[nz]
        bits = np.zeros((len(idx), self.qubit_count), dtype=bool)
        for q, p in self._dpos.items():
            bits[:, q] = (idx >> p) & 1
        for q, c in self._cpos.items():
            bits[:, q] = self.table[nz, c]
        return bits, self.amp[nz]

    def to_statevector(self, max_qubits: int | None = None) -> StateVector:
        cap = default_max_qubits() if max_qubits is None else max_qubits
        if self.qubit_count > cap:
            raise ResourceLimit(f"{self.qubit_count} qubits exceed dense cap {cap}",
                                {"qubits": self.qubit_count, "cap": cap})
        bits, amps = self.terms()
        index = bits.astype(np.int64) @ (np.int64(1) << np.arange(self.qubit_count, dtype=np.int64))
        out = np.zeros(1 << self.qubit_count, dtype=np.complex128)
        out[index] = amps
        return StateVector(out, self.qubit_count, max_qubits=cap, check_norm=False)

    def _split(self, register: Sequence[int], condition: Mapping[int, int] | None = None):
        register = list(register)
        if len(set(register)) != len(register) or any(not 0 <= q < self.qubit_count for q in register):
            raise InvalidRegister(f"register {register} is not a subset of {self.qubit_count} qubits")
        bits, amps = self.terms()
        if condition:
            keep = np.ones(len(amps), dtype=bool)
            for q, v in condition.items():
                keep &= bits[:, q] == bool(v)
            bits, amps = bits[keep], amps[keep]
        weights = np.int64(1) << np.arange(len(register), dtype=np.int64)
        reg = bits[:, register].astype(np.int64) @ weights if register else np.zeros(len(amps), np.int64)
        rest = np.delete(bits, register, axis=1)
        return reg, rest, amps

    def reduced_overlap(self, register: Sequence[int], target: StateVector,
                        condition: Mapping[int, int] | None = None) -> float:
        if target.qubit_count != len(register):
            raise DimensionError("target must live on exactly the register qubits")
        reg, rest, amps = self._split(register, condition)
        if not len(amps):
            return 0.0
        contrib = target.amplitudes.conj()[reg] * amps
        packed = np.packbits(rest, axis=1) if rest.shape[1] else np.zeros((len(amps), 1), np.uint8)
        _, group = np.unique(packed, axis=0, return_inverse=True)
        group = group.reshape(-1)
        re = np.bincount(group, weights=contrib.real)
        im = np.bincount(group, weights=contrib.imag)
        return float(np.sum(re ** 2 + im ** 2))

    def probability(self, condition: Mapping[int, int]) -> float:
        _, _, amps = self._split([], condition)
        return float(np.sum(np.abs(amps) ** 2))

    def register_distribution(self, register: Sequence[int]) -> dict[str, float]:
        reg, _, amps = self._split(register)
        probs = np.bincount(reg, weights=np.abs(amps) ** 2, minlength=1 << len(register))
        return {bitstring(v, len(register)): float(p) for v, p in enumerate(probs) if p > 0}

    def product_fidelity(self, register: Sequence[int], target: StateVector) -> float:
        """|<target (x) 0...0|psi>|^2 with every qubit outside ``register`` at |0>."""
        reg, rest, amps = self._split(register)
        clean = ~rest.any(axis=1)
        return float(abs(np.sum(target.amplitudes.conj()[reg[clean]] * amps[clean])) ** 2)

    def __repr__(self) -> str:
        return (f"HybridState(qubits={self.qubit_count}, dense={len(self.dense)}, "
                f"tracked={len(self.cols)}, norm={self.norm():.12f})")
