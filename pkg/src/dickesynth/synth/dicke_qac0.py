"""Exact Dicke states in QAC0 through amplitude amplification of a product state.

R_y(2 theta) on every qubit gives overlap c with |D^n_k>; theta is tuned so
that c = sin^2(pi/(4l+2)), and l rounds of [EXACT_k phase oracle, reflection
about the product state] then rotate the state onto |D^n_k> exactly.  Each
round is the textbook Grover iterate times -1, which only changes the global
phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from ..circuit import (
    Circuit,
    DepthConvention,
    Layer,
    RegisterMap,
    ResourceReport,
    compose,
    inverse,
    resource_report,
)
from ..errors import InvalidRegister
from ..gates import ProductReflection, ry, x, z
from .angles import AngleSolution, dicke_angles
from .threshold import MAX_K, _check_cap, _check_k, network_notes, synth_exact_circuit


@dataclass(frozen=True)
class SynthesisConfig:
    n: int
    k: int
    epsilon: float | None = None
    seed: int | None = None
    tol: float = 1e-13
    max_qubits: int | None = None
    use_complement: bool = False

    def __post_init__(self):
        if self.n < 1 or not 0 <= self.k <= self.n:
            raise ValueError(f"need 0 <= k <= n and n >= 1, got n={self.n}, k={self.k}")
        if self.epsilon is not None and not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")

    @property
    def effective_k(self) -> int:
        if self.use_complement and 2 * self.k > self.n:
            return self.n - self.k
        return self.k


class DickeSynthesis(NamedTuple):
    circuit: Circuit
    angles: AngleSolution | None
    report: ResourceReport


def output_qubit(c: Circuit) -> int:
    outs = c.registers.with_role("output")
    if len(outs) == 1:
        return outs[0]
    if c.registers.has_group("out") and len(c.registers.group("out")) == 1:
        return c.registers.group("out")[0]
    raise InvalidRegister("bit circuit needs exactly one output qubit")


def phase_oracle(bit_circuit: Circuit, output: int | None = None) -> Circuit:
    """compute, Z on the output bit, uncompute: diag((-1)^f(x)) with ancillas clean."""
    out = output_qubit(bit_circuit) if output is None else output
    flip = bit_circuit.replace(layers=(Layer((z(out),)),))
    return compose(bit_circuit, flip, inverse(bit_circuit))


def ry_layer(qubits, theta: float) -> Layer:
    return Layer(tuple(ry(q, 2 * theta) for q in qubits))


def product_reflection(qubits, theta: float) -> ProductReflection:
    """I - 2|eta><eta| for |eta> = (cos theta |0> + sin theta |1>)^(x n)."""
    phi = (complex(math.cos(theta)), complex(math.sin(theta)))
    return ProductReflection(tuple((q, phi) for q in qubits))


def _x_layer(c: Circuit, qubits) -> Circuit:
    return c.replace(layers=c.layers + (Layer(tuple(x(q) for q in qubits)),))


def synth_dicke_qac0(n: int, k: int, *, config: SynthesisConfig | None = None,
                     convention: DepthConvention | None = None) -> DickeSynthesis:
    """Exact |D^n_k> on qubits 0..n-1; every other qubit ends in |0>.

    ``config.use_complement`` prepares weight n-k and flips every qubit when
    k > n/2 (fewer ancillas, but depth then depends on which side of n/2 k is).
    """
    cfg = config or SynthesisConfig(n, k)
    if (cfg.n, cfg.k) != (n, k):
        raise ValueError("config disagrees with (n, k)")
    _check_cap(n, cfg.max_qubits)
    kk = cfg.effective_k
    flip = kk != k
    conv = convention or DepthConvention()
    notes = []
    if flip:
        notes.append(f"prepared weight {kk} then flipped every qubit")

    if kk in (0, n):
        c = Circuit.empty(RegisterMap.simple(n), "qac0", conv)
        if kk == n:
            c = _x_layer(c, range(n))
        if flip:
            c = _x_layer(c, range(n))
        return DickeSynthesis(c, None, resource_report(c, notes))

    _check_k(kk)
    angles = dicke_angles(n, kk)
    bit = synth_exact_circuit(n, kk, convention=conv, max_qubits=cfg.max_qubits)
    out = output_qubit(bit)
    bit = bit.replace(registers=bit.registers.relabeled({out: "ancilla"}))
    oracle = phase_oracle(bit, out)
    system = bit.registers.group("x")
    prep = bit.replace(layers=(ry_layer(system, angles.theta),))
    refl = bit.replace(layers=(Layer((product_reflection(system, angles.theta),)),))
    rounds = [c for _ in range(angles.grover_rounds) for c in (oracle, refl)]
    c = compose(prep, *rounds)
    if flip:
        c = _x_layer(c, system)
    notes.extend(network_notes(bit))
    notes.append(f"grover_rounds={angles.grover_rounds}")
    return DickeSynthesis(c, angles, resource_report(c, notes))


def synthesis_report(result: DickeSynthesis, n: int, k: int, fidelity: float | None = None) -> dict:
    a = result.angles
    return {
        "n": n,
        "k": k,
        "theta": a.theta if a else None,
        "c_target": a.c_target if a else None,
        "grover_rounds": a.grover_rounds if a else 0,
        "depth": result.report.depth,
        "ancillae": result.report.ancilla_count,
        "fidelity": fidelity,
    }


__all__ = ["DickeSynthesis", "MAX_K", "SynthesisConfig", "phase_oracle", "product_reflection",
           "ry_layer", "synth_dicke_qac0", "synthesis_report", "output_qubit"]
