"""Phase-exact rewriting of macros into primitive layers."""

from __future__ import annotations

import cmath

import numpy as np

from .circuit import Circuit, Layer, merge_parallel
from .gates import (
    H_MATRIX,
    ControlledXor,
    FanOut,
    Gate,
    GlobalCZ,
    MultiToffoli,
    ProductReflection,
    SingleQubit,
    h,
    x,
)

_H = np.array(H_MATRIX, dtype=complex).reshape(2, 2)
_OMEGA = cmath.exp(1j * cmath.pi / 4)
_T = np.diag([1, _OMEGA])
_TD = np.diag([1, _OMEGA.conjugate()])


def _u(q: int, m: np.ndarray, label: str) -> SingleQubit:
    return SingleQubit(q, tuple(m.reshape(4)), label)


def _basis_change(phi: tuple[complex, complex]) -> np.ndarray | None:
    """A unitary V with V|1> = phi, or None when V would be the identity."""
    a, b = phi
    v = np.array([[np.conj(b), a], [-np.conj(a), b]], dtype=complex)
    if np.allclose(v, np.eye(2), rtol=0, atol=1e-15):
        return None
    if abs(a - 1) < 1e-15 and abs(b) < 1e-15:
        return np.array([[0, 1], [1, 0]], dtype=complex)
    return v


def expand_multitoffoli(g: MultiToffoli) -> list[list[Gate]]:
    negs = [q for q, positive in g.controls if not positive]
    frame = [x(q) for q in negs] + [h(g.target)]
    core = [GlobalCZ(tuple(q for q, _ in g.controls) + (g.target,))]
    return [frame, core, list(frame)]


def expand_product_reflection(g: ProductReflection) -> list[list[Gate]]:
    pre, post = [], []
    for q, phi in g.support:
        v = _basis_change(phi)
        if v is not None:
            pre.append(_u(q, v.conj().T, "V†"))
            post.append(_u(q, v, "V"))
    return [pre, [GlobalCZ(g.qubits)], post]


def expand_controlled_xor(g: ControlledXor) -> list[list[Gate]]:
    """Toffoli fan via the phase polynomial 4cyz = c+y+z-(y^z)-(c^y)+(c^y^z)-(c^z).

    Every parity is formed in place with FanOut and CNOT layers, so no
    ancillas are used and the multi-qubit depth is 5 regardless of fan size.
    """
    c = g.control
    ys = [s for s, _ in g.pairs]
    zs = [d for _, d in g.pairs]
    m = len(g.pairs)
    cz = [GlobalCZ((y, z)) for y, z in g.pairs]
    return [
        [_u(c, np.diag([1, _OMEGA ** m]), "T^m")] + [_u(y, _T, "T") for y in ys]
        + [_u(z, _H @ _T @ _H, "HTH") for z in zs],
        list(cz),
        [_u(z, _TD @ _H, "T†H") for z in zs],
        [FanOut(c, tuple(ys + zs))],
        [_u(y, _TD, "T†") for y in ys] + [_u(z, _H @ _T, "HT") for z in zs],
        [FanOut(c, tuple(ys))],
        list(cz),
        [_u(z, _TD @ _H, "T†H") for z in zs],
        [FanOut(c, tuple(zs))],
        [h(z) for z in zs],
    ]


def expand_gate(g: Gate) -> list[list[Gate]]:
    if isinstance(g, MultiToffoli):
        return expand_multitoffoli(g)
    if isinstance(g, ProductReflection):
        return expand_product_reflection(g)
    if isinstance(g, ControlledXor):
        return expand_controlled_xor(g)
    return [[g]]


def expand_layers(layer: Layer | list[Gate]) -> list[list[Gate]]:
    gates = layer.gates if isinstance(layer, Layer) else layer
    if not any(g.is_macro for g in gates):
        return [list(gates)]
    merged = merge_parallel([expand_gate(g) for g in gates])
    return [l for l in merged if l]


def expand_macros(c: Circuit) -> Circuit:
    if not c.has_macros:
        return c
    layers = [Layer(tuple(l)) for layer in c.layers for l in expand_layers(layer)]
    return c.replace(layers=tuple(layers))
