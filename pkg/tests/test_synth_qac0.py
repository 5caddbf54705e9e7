import math

import numpy as np
import pytest

from dickesynth.boolean import BitString, SubsetFamily, choose_t, derandomize_family, exact_k, threshold_k
from dickesynth.circuit import ancilla_count, depth
from dickesynth.errors import ConfigMismatch, NoSolution, ResourceLimit, Unsupported
from dickesynth.expand import expand_macros
from dickesynth.gates import MultiToffoli
from dickesynth.simulator import HybridState, StateVector
from dickesynth.synth.angles import (
    AngleSolution,
    amplified_probability,
    binomial_overlap,
    dicke_angles,
    grover_rounds,
    solve_theta,
)
from dickesynth.synth.dicke_qac0 import SynthesisConfig, phase_oracle, synth_dicke_qac0, synthesis_report
from dickesynth.synth.threshold import synth_exact_circuit, synth_threshold_circuit
from dickesynth.synth.w_approx import ge_cubes, synth_w_approx, w_bit_circuit, w_theta
from dickesynth.verify import dicke_state, dicke_verdict, run, truth_table_check, w_state

# small root of 4 s (1 - s)^3 = 1/4, from numpy.roots on the expanded quartic
S_W4 = 0.08035662239291942


# ----------------------------------------------------------------- angles

def test_binomial_overlap_examples():
    assert abs(binomial_overlap(4, 1, math.asin(0.5)) - 0.421875) < 1e-15
    assert binomial_overlap(5, 2, 0.0) == 0
    assert binomial_overlap(5, 2, math.pi / 2) < 1e-30


def test_binomial_overlap_at_k_over_n_beats_exp():
    for n in range(2, 200):
        for k in range(1, n):
            assert binomial_overlap(n, k, math.asin(math.sqrt(k / n))) >= math.exp(-k)


def test_grover_rounds_examples():
    assert grover_rounds(1) == (1, pytest.approx(0.25, abs=1e-15))
    l, c = grover_rounds(2)
    assert l == 2 and abs(c - math.sin(math.pi / 10) ** 2) < 1e-16
    for k in range(1, 6):
        l, c = grover_rounds(k)
        assert c < math.exp(-k)
        prev = math.sin(math.pi / (4 * (l - 1) + 2)) ** 2
        assert prev >= math.exp(-k)
        assert abs(amplified_probability(c, l) - 1) < 1e-12


def test_solve_theta_small_root():
    a = solve_theta(4, 1, 0.25)
    assert abs(a.sin2 - S_W4) < 1e-10
    assert a.residual < 1e-12
    assert 0 < a.theta < math.asin(math.sqrt(1 / 4))
    assert a.branch == "increasing"


def test_solve_theta_errors():
    with pytest.raises(NoSolution):
        solve_theta(4, 1, 0.5)
    with pytest.raises(NoSolution):
        solve_theta(3, 3, 0.1)


def test_dicke_angles_residuals():
    for n in range(2, 30):
        for k in range(1, min(n, 5)):
            a = dicke_angles(n, k)
            assert abs(binomial_overlap(n, k, a.theta) - a.c_target) < 1e-12
            assert a.grover_rounds == grover_rounds(k)[0]


def test_angle_solution_validates():
    with pytest.raises(ValueError):
        AngleSolution(4, 1, 0.3, 0.25, 1, "increasing", 1e-3)


# ----------------------------------------------------------------- threshold circuits

def test_th0_is_single_nor():
    c = synth_threshold_circuit(4, 0)
    (gate,) = [g for g in c.gates()]
    assert isinstance(gate, MultiToffoli)
    assert all(not p for _, p in gate.controls)
    assert truth_table_check(c, lambda x: threshold_k(x, 0), 4).passed


@pytest.mark.parametrize("n,k", [(4, 1), (5, 2), (8, 2), (7, 3)])
def test_threshold_truth_tables(n, k):
    v = truth_table_check(synth_threshold_circuit(n, k), lambda x: threshold_k(x, k), n)
    assert v.passed, v.details


@pytest.mark.parametrize("n,k", [(4, 0), (4, 1), (6, 2), (8, 2), (3, 3), (2, 3)])
def test_exact_truth_tables(n, k):
    v = truth_table_check(synth_exact_circuit(n, k), lambda x: exact_k(x, k), n)
    assert v.passed, v.details


def test_exact_circuit_random_inputs_at_n10():
    rng = np.random.default_rng(10)
    from dickesynth.simulator import BasisBatch

    circuits = {k: synth_exact_circuit(10, k) for k in range(4)}
    for _ in range(1000):
        k = int(rng.integers(0, 4))
        v = int(rng.integers(0, 1 << 10))
        c = circuits[k]
        bits = np.zeros((1, c.qubit_count), dtype=bool)
        bits[0, :10] = [(v >> i) & 1 for i in range(10)]
        batch = BasisBatch(bits)
        batch.apply_circuit(c)
        out = c.registers.group("out")[0]
        assert int(batch.bits[0, out]) == exact_k(BitString.from_int(v, 10), k)


def test_exact_of_zero_input():
    for n in (3, 5):
        for k in range(0, 3):
            c = synth_exact_circuit(n, k)
            s = run(c)
            assert s.probability({c.registers.group("out")[0]: 1}) == (1.0 if k == 0 else 0.0)


def test_ancilla_envelope():
    # documented constant C = 1: ancillas <= n^(k+1) on this range
    for k in (1, 2, 3):
        for n in (4, 6, 8, 12, 16):
            assert ancilla_count(synth_threshold_circuit(n, k).registers) <= n ** (k + 1)


def test_threshold_depth_independent_of_n():
    for k in (1, 2):
        depths = {depth(expand_macros(synth_threshold_circuit(n, k))) for n in range(k + 2, 12)}
        assert len(depths) == 1


def test_k_above_cap_is_rejected():
    with pytest.raises(Unsupported, match="k <= 4"):
        synth_threshold_circuit(8, 5)


def test_wide_input_count_hits_cap():
    with pytest.raises(ResourceLimit):
        synth_threshold_circuit(30, 1, max_qubits=24)


# ----------------------------------------------------------------- phase oracle

def _exact1_oracle(n):
    bit = synth_exact_circuit(n, 1)
    out = bit.registers.group("out")[0]
    bit = bit.replace(registers=bit.registers.relabeled({out: "ancilla"}))
    return phase_oracle(bit, out)


def test_phase_oracle_signs():
    n = 3
    oracle = _exact1_oracle(n)
    amps = np.full(1 << n, 1 / math.sqrt(1 << n), dtype=complex)
    s = HybridState.from_amplitudes(oracle.qubit_count, list(range(n)), amps).apply_circuit(oracle)
    xs = list(range(n))
    others = [q for q in range(oracle.qubit_count) if q >= n]
    assert s.probability({q: 0 for q in others}) > 1 - 1e-12
    want = np.array([(-1) ** (bin(v).count("1") == 1) for v in range(1 << n)]) / math.sqrt(1 << n)
    assert s.product_fidelity(xs, StateVector(want, n)) > 1 - 1e-12
    # and the signs are exactly those, not just the modulus
    twice = HybridState.from_amplitudes(oracle.qubit_count, xs, amps).apply_circuit(oracle).apply_circuit(oracle)
    assert twice.product_fidelity(xs, StateVector(amps, n)) > 1 - 1e-12


# ----------------------------------------------------------------- Dicke QAC0

def test_w3_exact():
    res = synth_dicke_qac0(3, 1)
    v = dicke_verdict(res.circuit, 3, 1)
    assert v.passed and v.measured > 1 - 1e-12


@pytest.mark.parametrize("n,k", [(4, 1), (5, 2), (6, 2), (5, 3)])
def test_dicke_fidelity(n, k):
    res = synth_dicke_qac0(n, k)
    assert dicke_verdict(res.circuit, n, k).passed


def test_amplitudes_equal_and_positive():
    n, k = 4, 2
    c = synth_dicke_qac0(n, k).circuit
    bits, amps = run(c).terms()
    keep = np.abs(amps) > 1e-9
    bits, amps = bits[keep], amps[keep]
    # only the system qubits 0..n-1 may be non-zero
    assert not bits[:, n:].any()
    assert np.all(bits[:, :n].sum(axis=1) == k)
    on = amps
    assert len(on) == math.comb(n, k)
    phase = on[0] / abs(on[0])
    on = on / phase
    assert np.allclose(on.imag, 0, atol=1e-12)
    assert np.all(on.real > 0)
    assert np.allclose(on, 1 / math.sqrt(math.comb(n, k)), atol=1e-12)


def test_trivial_weights():
    for n in (1, 3):
        c0 = synth_dicke_qac0(n, 0).circuit
        assert dicke_verdict(c0, n, 0).passed
        cn = synth_dicke_qac0(n, n).circuit
        assert dicke_verdict(cn, n, n).passed
        assert depth(cn) == 0


def test_depth_flat_at_fixed_k():
    for k in (1, 2):
        depths = {synth_dicke_qac0(n, k).report.depth for n in range(k + 1, 11)}
        assert len(depths) == 1
    assert synth_dicke_qac0(4, 1).report.depth == synth_dicke_qac0(8, 1).report.depth


def test_complement_option():
    cfg = SynthesisConfig(5, 4, use_complement=True)
    res = synth_dicke_qac0(5, 4, config=cfg)
    assert dicke_verdict(res.circuit, 5, 4).passed
    assert res.angles.grover_rounds == 1


def test_report_fields():
    res = synth_dicke_qac0(4, 1)
    rep = synthesis_report(res, 4, 1, 1.0)
    assert rep["grover_rounds"] == 1
    assert set(rep) == {"n", "k", "theta", "c_target", "grover_rounds", "depth", "ancillae", "fidelity"}


def test_config_validation():
    with pytest.raises(ValueError):
        SynthesisConfig(3, 4)
    with pytest.raises(ValueError):
        SynthesisConfig(3, 1, epsilon=1.5)
    with pytest.raises(Unsupported):
        synth_dicke_qac0(9, 5)


# ----------------------------------------------------------------- approximate W

def test_ge_cubes_partition():
    for m in (1, 3, 5):
        for thr in range(0, (1 << m) + 2):
            cubes = ge_cubes(thr, m)
            for v in range(1 << m):
                hits = sum(all(((v >> b) & 1) == val for b, val in cube) for cube in cubes)
                assert hits == (1 if v >= thr else 0)


@pytest.mark.parametrize("threshold,parallel", [("counter", False), ("dnf", False), ("dnf", True)])
def test_w_bit_circuit_matches_repeated_decision(threshold, parallel):
    from dickesynth.boolean import repeated_gadget_decision

    rng = np.random.default_rng(21)
    from dickesynth.boolean import sample_family

    fam = sample_family(4, 8, rng)
    c = w_bit_circuit(4, fam, threshold=threshold, parallel=parallel)
    v = truth_table_check(c, lambda x: repeated_gadget_decision(fam, x), 4)
    assert v.passed, v.details


def test_w_exact_oracle_is_perfect():
    res = synth_w_approx(5, 0.5, None, oracle="exact")
    s = run(res.circuit)
    assert s.product_fidelity(list(res.circuit.registers.group("x")), w_state(5)) > 1 - 1e-12


def test_w_family_size_must_match_epsilon():
    fam = SubsetFamily(4, ((0,),) * 8)
    with pytest.raises(ConfigMismatch):
        synth_w_approx(4, 0.5, fam)


def test_w_ancillas_constant_in_n():
    t = choose_t(0.5 / 9)
    counts = set()
    for n in (4, 10):
        fam = SubsetFamily(n, tuple((0,) for _ in range(t)))
        counts.add(synth_w_approx(n, 0.5, fam).report.ancilla_count)
    assert len(counts) == 1


@pytest.mark.slow
def test_w6_derandomized_fidelity():
    t = choose_t(0.5 / 9)
    fam = derandomize_family(6, t, w_theta(6), 200, seed=20240601)
    res = synth_w_approx(6, 0.5, fam)
    s = run(res.circuit)
    assert s.product_fidelity(list(res.circuit.registers.group("x")), w_state(6)) >= 0.5


def test_dicke_state_examples():
    w = dicke_state(3, 1).amplitudes
    assert np.allclose(w[[1, 2, 4]], 1 / math.sqrt(3)) and abs(np.linalg.norm(w) - 1) < 1e-15
    assert np.allclose(dicke_state(2, 2).amplitudes, [0, 0, 0, 1])
    d = dicke_state(4, 2).amplitudes
    assert np.count_nonzero(d) == 6 and np.allclose(d[d != 0], 1 / math.sqrt(6))
