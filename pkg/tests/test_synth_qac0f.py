import itertools
import math

import numpy as np
import pytest

from dickesynth.circuit import compose
from dickesynth.errors import ResourceLimit
from dickesynth.simulator import BasisBatch, HybridState, conditional_overlap
from dickesynth.synth.qac0f import (
    BlockLayout,
    check_layout_cap,
    choose_M,
    gamma,
    gamma_lower_bound,
    p_good,
    synth_block_init,
    synth_cswap_extract,
    synth_dicke_qac0f,
    synth_good_flag,
    synth_lsb_onehot,
    synth_preparation,
    tune_amplitude,
)
from dickesynth.verify import dicke_state, dicke_verdict, run

# 1 - (1 - 0.421875)^3, plain float arithmetic
GAMMA_413 = 0.8067741394042969


# ----------------------------------------------------------------- formulas

def test_p_good_examples():
    assert p_good(4, 1) == 0.421875
    assert p_good(4, 2) == 0.375


def test_p_good_central_envelope():
    # Stirling gives p_good(n, n/2) ~ sqrt(2 / (pi n)); 0.7 sits below that for every n here
    for n in range(2, 1001):
        assert p_good(n, n // 2) * math.sqrt(n) >= 0.7


def test_gamma_examples():
    assert abs(gamma(4, 1, 3) - GAMMA_413) < 1e-15
    assert gamma(5, 2, 1) == p_good(5, 2)
    for n, k, M in [(3, 1, 2), (4, 1, 3), (4, 2, 3), (10, 3, 7), (50, 5, 20)]:
        assert gamma(n, k, M) >= gamma_lower_bound(n, k, M)


def test_choose_M():
    assert choose_M(4, 1, "paper") == 3
    assert choose_M(3, 1, "desk", 0.5) == 2
    for n in range(2, 60):
        for k in (1, 2):
            if k < n:
                assert gamma(n, k, choose_M(n, k, "paper")) >= 1 - 1 / math.e
    with pytest.raises(ValueError):
        choose_M(4, 1, "other")


def test_tune_amplitude():
    t = tune_amplitude(GAMMA_413)
    assert t.rounds == 1 and t.gamma_tilde == pytest.approx(0.25, abs=1e-15)
    assert abs(math.sin(t.phi) ** 2 - 0.25 / GAMMA_413) < 1e-14
    exact = tune_amplitude(0.25)
    assert abs(exact.amplitude - 1) < 1e-12
    small = tune_amplitude(0.1)
    assert small.rounds == 2 and small.gamma_tilde <= 0.1


# ----------------------------------------------------------------- stages

def _block_bits(bits, block):
    return bits[:, list(block)]


def test_block_init_statistics():
    n, k, M = 3, 1, 2
    L = BlockLayout.build(n, k, M)
    s = run(synth_block_init(L))
    p = p_good(n, k)
    for i in range(M):
        assert abs(s.probability({L.A[i]: 1}) - p) < 1e-10
        assert abs(conditional_overlap(s, L.T[i], dicke_state(n, k), {L.A[i]: 1}) - 1) < 1e-10
    assert abs(s.probability({q: 0 for q in L.A}) - (1 - p) ** M) < 1e-10


@pytest.mark.parametrize("parallel", [False, True])
def test_lsb_onehot_exhaustive(parallel):
    M = 4
    L = BlockLayout.build(1, 1, M, parallel_select=parallel)
    c = synth_lsb_onehot(L)
    rows = list(itertools.product((0, 1), repeat=M))
    bits = np.zeros((len(rows), c.qubit_count), dtype=bool)
    for r, a in enumerate(rows):
        bits[r, list(L.A)] = a
    batch = BasisBatch(bits.copy()).apply_circuit(c)
    for r, a in enumerate(rows):
        s = batch.bits[r, list(L.S)].astype(int)
        if any(a):
            lsb = a.index(1)
            assert list(s) == [int(j == lsb) for j in range(M)]
        else:
            assert not s.any()
        # A and every copy are restored
        others = [q for q in range(c.qubit_count) if q not in L.S]
        assert np.array_equal(batch.bits[r, others], bits[r, others])


def test_lsb_onehot_example():
    L = BlockLayout.build(1, 1, 4)
    bits = np.zeros((1, L.qubit_count), dtype=bool)
    bits[0, list(L.A)] = [0, 1, 1, 0]
    batch = BasisBatch(bits).apply_circuit(synth_lsb_onehot(L))
    assert list(batch.bits[0, list(L.S)].astype(int)) == [0, 1, 0, 0]


@pytest.mark.parametrize("parallel", [False, True])
def test_cswap_single_block(parallel):
    n = 3
    L = BlockLayout.build(n, 1, 1, parallel_extract=parallel)
    c = synth_cswap_extract(L)
    for v in range(1 << n):
        for sel in (0, 1):
            bits = np.zeros((1, c.qubit_count), dtype=bool)
            bits[0, list(L.T[0])] = [(v >> i) & 1 for i in range(n)]
            bits[0, L.S[0]] = sel
            out = BasisBatch(bits.copy()).apply_circuit(c).bits[0]
            if sel:
                assert list(out[list(L.Q)]) == list(bits[0, list(L.T[0])])
                assert not out[list(L.T[0])].any()
            else:
                assert np.array_equal(out, bits[0])


def _prefix(L):
    return compose(synth_block_init(L), synth_lsb_onehot(L), synth_cswap_extract(L), synth_good_flag(L))


def test_extraction_overlap_equals_gamma():
    n, k, M = 3, 1, 2
    L = BlockLayout.build(n, k, M)
    s = run(_prefix(L))
    g = gamma(n, k, M)
    assert abs(s.reduced_overlap(L.Q, dicke_state(n, k)) - g) < 1e-9
    assert abs(s.probability({L.a0: 1}) - g) < 1e-10
    assert conditional_overlap(s, L.Q, dicke_state(n, k), {L.a0: 1}) > 1 - 1e-10


def _common_terms(L, state, drop):
    bits, amps = state.terms()
    keep = np.abs(amps) > 1e-13
    bits, amps = bits[keep], amps[keep]
    assert not bits[:, list(drop)].any()
    cols = [q for q in range(L.qubit_count) if q not in set(drop)]
    return {tuple(b[cols].astype(int)): a for b, a in zip(bits, amps)}


def test_parallel_extract_matches_sequential():
    n, k, M = 2, 1, 2
    seq = BlockLayout.build(n, k, M)
    par = BlockLayout.build(n, k, M, parallel_extract=True)
    s1 = _common_terms(seq, run(_prefix(seq)), ())
    extra = [q for block in par.scratch + par.q_copies for q in block]
    s2 = _common_terms(par, run(_prefix(par)), extra)
    assert s1.keys() == s2.keys()
    assert max(abs(s1[key] - s2[key]) for key in s1) < 1e-12


def test_good_flag_examples():
    L = BlockLayout.build(1, 1, 4)
    c = synth_good_flag(L)
    for a, want in [((0, 0, 0, 0), 0), ((0, 0, 1, 0), 1)]:
        bits = np.zeros((1, c.qubit_count), dtype=bool)
        bits[0, list(L.A)] = a
        assert BasisBatch(bits).apply_circuit(c).bits[0, L.a0] == want


def test_tuned_success_probability():
    n, k, M = 3, 1, 2
    L = BlockLayout.build(n, k, M)
    t = tune_amplitude(gamma(n, k, M))
    s = run(synth_preparation(L, t))
    assert abs(s.probability({L.a: 1, L.b: 1}) - t.gamma_tilde) < 1e-10


# ----------------------------------------------------------------- pipeline

@pytest.mark.parametrize("n,k,M", [(3, 1, 2), (2, 1, 1), (4, 2, 3)])
def test_pipeline_fidelity(n, k, M):
    res = synth_dicke_qac0f(n, k, M)
    v = dicke_verdict(res.circuit, n, k, res.layout.Q, require_clean=False)
    assert v.passed, v.details
    circuit, report = res
    assert report.depth == res.report.depth


@pytest.mark.parametrize("kw", [dict(parallel_select=True), dict(parallel_extract=True), dict(oracle="explicit")])
def test_pipeline_variants(kw):
    n, k, M = 2, 1, 2
    res = synth_dicke_qac0f(n, k, M, **kw)
    v = dicke_verdict(res.circuit, n, k, res.layout.Q, require_clean=False)
    assert v.passed, v.details


def test_depth_flat_over_n():
    depths = {synth_dicke_qac0f(n, 1, 3).report.depth for n in (3, 4, 5)}
    assert len(depths) == 1


def test_layout_cap():
    L = BlockLayout.build(6, 3, 4)
    with pytest.raises(ResourceLimit) as err:
        check_layout_cap(L, 24)
    assert err.value.estimate["dense_estimate"] == 6 * 4 + 6 + 4 + 1
    with pytest.raises(ResourceLimit):
        synth_dicke_qac0f(6, 3, 4, max_qubits=24)


def test_runtime_cap_on_wide_variant():
    # the parallel extraction holds scratch copies in superposition as well
    res = synth_dicke_qac0f(2, 1, 2, parallel_extract=True)
    with pytest.raises(ResourceLimit):
        HybridState(res.circuit.qubit_count, max_dense=res.layout.dense_estimate() - 1).apply_circuit(res.circuit)


def test_layout_registers_disjoint():
    L = BlockLayout.build(3, 1, 3, parallel_select=True, parallel_extract=True)
    qubits = [q for block in L.T for q in block] + list(L.A) + list(L.S) + list(L.Q) + [L.a0, L.a, L.b]
    qubits += [q for c in L.select_copies + L.scratch + L.q_copies for q in c]
    assert len(qubits) == len(set(qubits)) == L.qubit_count
