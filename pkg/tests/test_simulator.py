import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dickesynth.errors import DimensionError, ResourceLimit
from dickesynth.gates import FanOut, GlobalCZ, MultiToffoli, WeightOracle, cnot, h, ry, x
from dickesynth.simulator import (
    BasisBatch,
    HybridState,
    StateVector,
    apply_circuit,
    apply_gate,
    conditional_overlap,
    fidelity,
    probability,
    reduced_overlap,
    register_distribution,
    run_dense,
    simulate,
)
from dickesynth.simulator.statevector import CAP_ENV, check_cap
from dickesynth.verify import dicke_state

from conftest import circuit_of


def test_global_cz_phases_all_ones():
    s = apply_gate(StateVector.basis(2, 0b11), GlobalCZ((0, 1)))
    assert np.allclose(s.amplitudes, -StateVector.basis(2, 0b11).amplitudes)
    s = apply_gate(StateVector.basis(2, 0), GlobalCZ((0, 1)))
    assert np.allclose(s.amplitudes, StateVector.basis(2, 0).amplitudes)


def test_fanout_copies_control():
    s = apply_gate(StateVector.basis(3, 0b001), FanOut(0, (1, 2)))
    assert np.allclose(s.amplitudes, StateVector.basis(3, 0b111).amplitudes)


def test_fidelity_basics(rng):
    a = StateVector.basis(1, 0)
    b = StateVector.basis(1, 1)
    assert fidelity(a, a).value == 1
    assert fidelity(a, b).value == 0


def test_product_state_overlap_with_w4():
    theta = math.asin(0.5)  # sin^2 = 1/4
    s = run_dense(circuit_of(4, [ry(q, 2 * theta) for q in range(4)]))
    assert abs(fidelity(s, dicke_state(4, 1)).value - 0.421875) < 1e-12


def _w_with_junk(n_junk_state):
    w = dicke_state(3, 1).amplitudes
    return StateVector(np.kron(n_junk_state, w), 4)


def test_reduced_overlap_product_junk():
    junk = np.array([0.6, 0.8j])
    s = _w_with_junk(junk)
    assert abs(reduced_overlap(s, [0, 1, 2], dicke_state(3, 1)).value - 1) < 1e-12


def test_reduced_overlap_orthogonal_sector():
    s = StateVector.basis(4, 0)
    assert reduced_overlap(s, [0, 1, 2], dicke_state(3, 1)).value < 1e-15


def test_reduced_overlap_mixture():
    w = dicke_state(3, 1).amplitudes
    zero = StateVector.basis(3, 0).amplitudes
    alpha, beta = np.array([1, 0]), np.array([0, 1])
    v = math.sqrt(0.8) * np.kron(alpha, w) + math.sqrt(0.2) * np.kron(beta, zero)
    s = StateVector(v, 4)
    assert abs(reduced_overlap(s, [0, 1, 2], dicke_state(3, 1)).value - 0.8) < 1e-12
    assert abs(conditional_overlap(s, [0, 1, 2], dicke_state(3, 1), {3: 0}) - 1) < 1e-12


def test_register_distribution_sums_to_one(rng):
    from conftest import random_state

    s = random_state(4, rng)
    dist = register_distribution(s, [3, 1])
    assert abs(sum(dist.values()) - 1) < 1e-10
    # character i of the key is register qubit i
    p = probability(s, {3: 1, 1: 0})
    assert abs(p - dist.get("10", 0)) < 1e-12


def test_dimension_checks():
    with pytest.raises(DimensionError):
        StateVector(np.ones(3))
    with pytest.raises(DimensionError):
        StateVector(np.ones(4), 2)
    with pytest.raises(DimensionError):
        reduced_overlap(StateVector.basis(3, 0), [0, 1], dicke_state(3, 1))


def test_cap_from_environment(monkeypatch):
    monkeypatch.setenv(CAP_ENV, "5")
    with pytest.raises(ResourceLimit) as err:
        StateVector.zero(6)
    assert err.value.estimate["qubits"] == 6
    check_cap(5)


def test_hybrid_enforces_cap_at_runtime():
    c = circuit_of(6, [h(q) for q in range(6)])
    with pytest.raises(ResourceLimit):
        HybridState(6, max_dense=4).apply_circuit(c)


def test_hybrid_tracks_classical_qubits():
    # 30 qubits, but only two ever leave the computational basis
    n = 30
    c = circuit_of(n, [h(0), x(5)], [FanOut(0, (1, 2, 3))], [MultiToffoli(((5, True), (1, True)), 29)],
                   [WeightOracle((10, 11, 12), 13, (0,))])
    s = HybridState(n, max_dense=6).apply_circuit(c)
    assert s.peak_dense <= 6
    assert abs(s.probability({0: 1, 29: 1, 13: 1}) - 0.5) < 1e-12
    assert abs(s.probability({0: 0, 29: 0, 13: 1}) - 0.5) < 1e-12


gate_st = st.one_of(
    st.builds(lambda q, a: ry(q, a), st.integers(0, 4), st.floats(-3, 3)),
    st.builds(lambda q: h(q), st.integers(0, 4)),
    st.builds(lambda q: x(q), st.integers(0, 4)),
    st.builds(lambda qs: GlobalCZ(tuple(qs)), st.lists(st.integers(0, 4), min_size=1, max_size=4, unique=True)),
    st.builds(lambda qs: FanOut(qs[0], tuple(qs[1:])), st.lists(st.integers(0, 4), min_size=2, max_size=4,
                                                                   unique=True)),
    st.builds(lambda qs, p: MultiToffoli(tuple(zip(qs[:-1], p)), qs[-1]),
              st.lists(st.integers(0, 4), min_size=2, max_size=4, unique=True), st.lists(st.booleans(), min_size=3,
                                                                                          max_size=3)),
    st.builds(lambda qs, w: WeightOracle(tuple(qs[:-1]), qs[-1], (w % len(qs),)),
              st.lists(st.integers(0, 4), min_size=2, max_size=5, unique=True), st.integers(0, 4)),
)


@settings(max_examples=60, deadline=None)
@given(st.lists(gate_st, min_size=1, max_size=12))
def test_hybrid_matches_dense(gates):
    c = circuit_of(5, *[[g] for g in gates])
    dense = run_dense(c)
    hyb = HybridState(5, max_dense=5).apply_circuit(c).to_statevector()
    assert np.allclose(dense.amplitudes, hyb.amplitudes, atol=1e-10)
    # the macro-level hybrid run agrees with the primitive dense run
    assert np.allclose(simulate(c, backend="hybrid", expand=False).to_statevector().amplitudes,
                       dense.amplitudes, atol=1e-10)


def test_basis_batch_truth_table():
    c = circuit_of(3, [cnot(0, 2)], [MultiToffoli(((0, False), (1, True)), 2)])
    bits = np.array([[(v >> q) & 1 for q in range(3)] for v in range(8)], dtype=bool)
    batch = BasisBatch(bits.copy())
    batch.apply_circuit(c)
    for v in range(8):
        a, b, t = bits[v]
        assert batch.bits[v, 2] == (t ^ a ^ ((not a) and b))
    assert np.allclose(batch.phase, 1)


def test_apply_circuit_rejects_macros():
    from dickesynth.errors import MacroNotExpanded

    with pytest.raises(MacroNotExpanded):
        apply_circuit(StateVector.zero(2), circuit_of(2, [cnot(0, 1)]))
