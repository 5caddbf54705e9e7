import itertools

import numpy as np
import pytest

from dickesynth.circuit import Circuit, Layer, RegisterMap
from dickesynth.simulator import StateVector, apply_circuit
from dickesynth.expand import expand_macros


def circuit_of(n, *layers, model="qac0f"):
    return Circuit(n, tuple(Layer(tuple(l)) for l in layers), RegisterMap.simple(n), model)


def unitary_of(circuit):
    """Column j = circuit applied to basis state j (expanded to primitives)."""
    c = expand_macros(circuit)
    n = c.qubit_count
    cols = [apply_circuit(StateVector.basis(n, j), c).amplitudes for j in range(1 << n)]
    return np.stack(cols, axis=1)


def permutation_matrix(n, fn, phase=lambda bits: 1):
    """Reference unitary from a classical map on bit tuples (bit q = qubit q)."""
    U = np.zeros((1 << n, 1 << n), dtype=complex)
    for j in range(1 << n):
        bits = tuple((j >> q) & 1 for q in range(n))
        out = fn(bits)
        i = sum(b << q for q, b in enumerate(out))
        U[i, j] = phase(bits)
    return U


def all_bits(n):
    return itertools.product((0, 1), repeat=n)


def random_state(n, rng):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(v / np.linalg.norm(v), n)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
