"""Gate set: primitives, macros and the black-box weight oracle.

Primitives are ``SingleQubit``, ``GlobalCZ`` and ``FanOut``.  ``MultiToffoli``,
``ProductReflection`` and ``ControlledXor`` are macros that ``expand_macros``
rewrites into primitives.  ``WeightOracle`` is kept as an opaque gate with a
declared depth; simulators apply it semantically.

Qubit ``q`` is bit ``q`` of a basis index (little-endian).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Union

import numpy as np

from .errors import InvalidGate

UNITARY_TOL = 1e-12

Matrix2 = tuple[complex, complex, complex, complex]


def _check_qubit(q: int) -> int:
    if not isinstance(q, (int, np.integer)) or isinstance(q, bool) or q < 0:
        raise InvalidGate(f"qubit index must be a non-negative integer, got {q!r}")
    return int(q)


def _distinct(qubits: Iterable[int], what: str) -> tuple[int, ...]:
    out = tuple(_check_qubit(q) for q in qubits)
    if len(set(out)) != len(out):
        raise InvalidGate(f"{what} contains duplicate qubits: {out}")
    return out


@dataclass(frozen=True)
class SingleQubit:
    target: int
    matrix: Matrix2
    label: str = ""

    kind = "1q"
    is_macro = False

    def __post_init__(self):
        object.__setattr__(self, "target", _check_qubit(self.target))
        m = np.asarray(self.matrix, dtype=complex).reshape(2, 2)
        if not np.allclose(m.conj().T @ m, np.eye(2), rtol=0, atol=UNITARY_TOL):
            raise InvalidGate(f"matrix on qubit {self.target} is not unitary")
        object.__setattr__(self, "matrix", tuple(complex(v) for v in m.reshape(4)))

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=complex).reshape(2, 2)

    @property
    def is_diagonal(self) -> bool:
        return self.matrix[1] == 0 and self.matrix[2] == 0

    @property
    def is_antidiagonal(self) -> bool:
        return self.matrix[0] == 0 and self.matrix[3] == 0

    def inverse(self) -> "SingleQubit":
        label = self.label[:-1] if self.label.endswith("†") else (self.label and self.label + "†")
        return SingleQubit(self.target, tuple(self.array.conj().T.reshape(4)), label)

    def remap(self, f: Callable[[int], int]) -> "SingleQubit":
        return SingleQubit(f(self.target), self.matrix, self.label)


@dataclass(frozen=True)
class GlobalCZ:
    """Phase -1 on basis states whose support bits are all 1."""

    support: tuple[int, ...]

    kind = "gcz"
    is_macro = False

    def __post_init__(self):
        support = _distinct(self.support, "GlobalCZ support")
        if not support:
            raise InvalidGate("GlobalCZ support must be non-empty")
        object.__setattr__(self, "support", tuple(sorted(support)))

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.support

    def inverse(self) -> "GlobalCZ":
        return self

    def remap(self, f):
        return GlobalCZ(tuple(f(q) for q in self.support))


@dataclass(frozen=True)
class FanOut:
    """XOR the control bit into every target."""

    control: int
    targets: tuple[int, ...]

    kind = "fanout"
    is_macro = False

    def __post_init__(self):
        control = _check_qubit(self.control)
        targets = _distinct(self.targets, "FanOut targets")
        if not targets:
            raise InvalidGate("FanOut needs at least one target")
        if control in targets:
            raise InvalidGate("FanOut control may not be a target")
        object.__setattr__(self, "control", control)
        object.__setattr__(self, "targets", tuple(sorted(targets)))

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.control, *self.targets)

    def inverse(self) -> "FanOut":
        return self

    def remap(self, f):
        return FanOut(f(self.control), tuple(f(q) for q in self.targets))


@dataclass(frozen=True)
class MultiToffoli:
    """Flip ``target`` iff every control matches its polarity.

    ``controls`` holds ``(qubit, positive)`` pairs; a negative control fires on 0.
    """

    controls: tuple[tuple[int, bool], ...]
    target: int

    kind = "mct"
    is_macro = True

    def __post_init__(self):
        controls = tuple((_check_qubit(q), bool(p)) for q, p in self.controls)
        if not controls:
            raise InvalidGate("MultiToffoli needs at least one control")
        _distinct([q for q, _ in controls] + [self.target], "MultiToffoli support")
        object.__setattr__(self, "controls", controls)
        object.__setattr__(self, "target", _check_qubit(self.target))

    @property
    def qubits(self) -> tuple[int, ...]:
        return (*(q for q, _ in self.controls), self.target)

    def inverse(self) -> "MultiToffoli":
        return self

    def remap(self, f):
        return MultiToffoli(tuple((f(q), p) for q, p in self.controls), f(self.target))


@dataclass(frozen=True)
class ProductReflection:
    """I - 2|phi><phi| for a product state given qubit by qubit."""

    support: tuple[tuple[int, tuple[complex, complex]], ...]

    kind = "prodref"
    is_macro = True

    def __post_init__(self):
        if not self.support:
            raise InvalidGate("ProductReflection support must be non-empty")
        cleaned = []
        for q, vec in self.support:
            v = np.asarray(vec, dtype=complex).reshape(2)
            norm = float(np.linalg.norm(v))
            if abs(norm - 1) > 1e-12:
                raise InvalidGate(f"reflection state on qubit {q} is not normalized")
            cleaned.append((_check_qubit(q), (complex(v[0]), complex(v[1]))))
        _distinct([q for q, _ in cleaned], "ProductReflection support")
        object.__setattr__(self, "support", tuple(cleaned))

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.support)

    def inverse(self) -> "ProductReflection":
        return self

    def remap(self, f):
        return ProductReflection(tuple((f(q), v) for q, v in self.support))


@dataclass(frozen=True)
class ControlledXor:
    """For every ``(src, dst)`` pair: ``dst ^= control & src``.

    A fan of Toffolis sharing one control; it expands ancilla-free into
    FanOut/GlobalCZ layers of constant depth.
    """

    control: int
    pairs: tuple[tuple[int, int], ...]

    kind = "cxor"
    is_macro = True

    def __post_init__(self):
        pairs = tuple((_check_qubit(s), _check_qubit(d)) for s, d in self.pairs)
        if not pairs:
            raise InvalidGate("ControlledXor needs at least one pair")
        _distinct([self.control] + [q for p in pairs for q in p], "ControlledXor support")
        object.__setattr__(self, "control", _check_qubit(self.control))
        object.__setattr__(self, "pairs", pairs)

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.control, *(q for p in self.pairs for q in p))

    def inverse(self) -> "ControlledXor":
        return self

    def remap(self, f):
        return ControlledXor(f(self.control), tuple((f(s), f(d)) for s, d in self.pairs))


@dataclass(frozen=True)
class WeightOracle:
    """Flip ``target`` iff the Hamming weight of ``inputs`` lies in ``weights``."""

    inputs: tuple[int, ...]
    target: int
    weights: tuple[int, ...]

    kind = "weight"
    is_macro = False

    def __post_init__(self):
        inputs = _distinct(self.inputs, "WeightOracle inputs")
        if not inputs:
            raise InvalidGate("WeightOracle needs inputs")
        _distinct(inputs + (self.target,), "WeightOracle support")
        weights = tuple(sorted({int(w) for w in self.weights}))
        if any(w < 0 or w > len(inputs) for w in weights):
            raise InvalidGate(f"weights {weights} out of range for {len(inputs)} inputs")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "target", _check_qubit(self.target))
        object.__setattr__(self, "weights", weights)

    @property
    def qubits(self) -> tuple[int, ...]:
        return (*self.inputs, self.target)

    def inverse(self) -> "WeightOracle":
        return self

    def remap(self, f):
        return WeightOracle(tuple(f(q) for q in self.inputs), f(self.target), self.weights)


Gate = Union[SingleQubit, GlobalCZ, FanOut, MultiToffoli, ProductReflection, ControlledXor, WeightOracle]

PRIMITIVE_TYPES = (SingleQubit, GlobalCZ, FanOut, WeightOracle)
MACRO_TYPES = (MultiToffoli, ProductReflection, ControlledXor)


def is_multi_qubit(gate: Gate) -> bool:
    return len(gate.qubits) >= 2


# ---------------------------------------------------------------- constructors

_S2 = 1 / math.sqrt(2)
H_MATRIX = (_S2, _S2, _S2, -_S2)
X_MATRIX = (0, 1, 1, 0)
Z_MATRIX = (1, 0, 0, -1)


def h(q: int) -> SingleQubit:
    return SingleQubit(q, H_MATRIX, "H")


def x(q: int) -> SingleQubit:
    return SingleQubit(q, X_MATRIX, "X")


def z(q: int) -> SingleQubit:
    return SingleQubit(q, Z_MATRIX, "Z")


def phase(q: int, angle: float, label: str = "P") -> SingleQubit:
    return SingleQubit(q, (1, 0, 0, cmath.exp(1j * angle)), label)


def ry_matrix(angle: float) -> Matrix2:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return (c, -s, s, c)


def ry(q: int, angle: float) -> SingleQubit:
    """R_y(angle) = exp(-i angle Y / 2); maps |0> to cos(angle/2)|0> + sin(angle/2)|1>."""
    return SingleQubit(q, ry_matrix(angle), "RY")


def cnot(control: int, target: int) -> MultiToffoli:
    return MultiToffoli(((control, True),), target)
