import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dickesynth.boolean import (
    BitString,
    SubsetFamily,
    beta_weights,
    choose_t,
    decision_threshold,
    derandomize_family,
    derandomize_search,
    error_profile,
    exact_acceptance,
    exact_k,
    gadget_eval,
    hamming_weight,
    log_width,
    monte_carlo_acceptance,
    monte_carlo_decision_error,
    partition_sets,
    repeated_gadget_decision,
    sample_family,
    success_count,
    threshold_k,
    threshold_recursion_eval,
)
from dickesynth.errors import DimensionError, Unsupported
from dickesynth.synth.w_approx import w_theta


def bs(text):
    return BitString.from_str(text)


def test_bitstring_round_trip():
    x = BitString.from_int(0b1011, 5)
    assert x.to_int() == 0b1011 and x.n == 5 and x.weight == 3
    assert str(bs("0110")) == "0110"
    with pytest.raises(DimensionError):
        BitString.from_int(32, 5)


def test_exact_and_threshold_examples():
    assert exact_k(bs("1100"), 2) == 1
    assert exact_k(bs("1110"), 2) == 0
    assert exact_k(bs("0000"), 0) == 1
    assert threshold_k(bs("0110"), 2) == 1
    assert threshold_k(bs("0111"), 2) == 0
    assert threshold_k(bs("0111"), -1) == 0


def test_exact_is_threshold_difference():
    for n in range(1, 13):
        for v in range(1 << n):
            x = BitString.from_int(v, n)
            for k in range(0, n + 1):
                assert exact_k(x, k) == (threshold_k(x, k) & (1 - threshold_k(x, k - 1)))


def test_partition_sets():
    parts = partition_sets(4)
    assert parts[0] == ((0, 2), (1, 3))
    assert len(partition_sets(8)) == 3
    for s0, s1 in partition_sets(8):
        assert len(s0) == len(s1) == 4
    # every pair of indices is separated at some level
    for n in (3, 5, 8, 11):
        parts = partition_sets(n)
        assert len(parts) == log_width(n)
        for i, j in itertools.combinations(range(n), 2):
            assert any((i in s0) != (j in s0) for s0, _ in parts)
        for s0, s1 in parts:
            assert sorted(s0 + s1) == list(range(n))


def test_recursion_examples():
    for k in range(4):
        assert threshold_recursion_eval(bs("0000"), k) == 1
    assert threshold_recursion_eval(bs("1111"), 2) == 0


def test_recursion_exhaustive_to_12_bits():
    for n in range(1, 13):
        for k in range(0, 5):
            for v in range(1 << n):
                x = BitString.from_int(v, n)
                assert threshold_recursion_eval(x, k) == threshold_k(x, k), (n, k, v)


def test_gadget_examples():
    assert gadget_eval((0, 1), bs("0000")) == 0
    # single one at position 2, S = everything else
    assert gadget_eval((0, 1, 3), bs("0010")) == 1
    assert gadget_eval((2,), bs("0010")) == 0


def test_gadget_monte_carlo_half_at_weight_one():
    rate = monte_carlo_acceptance(bs("00100000"), 100_000, np.random.default_rng(11))
    assert abs(rate - 0.5) < 0.01


def test_exact_acceptance_is_two_to_minus_weight():
    for n in range(1, 11):
        for v in range(1 << n):
            x = BitString.from_int(v, n)
            want = Fraction(0) if x.weight == 0 else Fraction(1, 2 ** x.weight)
            assert exact_acceptance(x) == want


def test_choose_t_examples():
    assert choose_t(1 / math.e) == 64
    assert choose_t(0.1) == 152
    ts = [choose_t(e) for e in (0.01, 0.05, 0.1, 0.3, 0.5, 0.9)]
    assert ts == sorted(ts, reverse=True)
    with pytest.raises(ValueError):
        choose_t(1.0)


@given(st.floats(1e-6, 0.999))
def test_choose_t_properties(eps):
    t = choose_t(eps)
    assert t % 8 == 0
    assert math.exp(-t / 64) <= eps * (1 + 1e-12)
    assert t - 8 < math.ceil(64 * math.log(1 / eps))


def test_repeated_decision():
    rng = np.random.default_rng(3)
    fam = sample_family(6, 16, rng)
    assert repeated_gadget_decision(fam, bs("000000")) == 0
    assert decision_threshold(8) == 4  # 4 > 3
    # hand-built t=8 family with exactly 4 accepting gadgets on x = 100000
    x = bs("100000")
    good, bad = (1, 2, 3, 4, 5), (0,)
    fam = SubsetFamily(6, (good,) * 4 + (bad,) * 4)
    assert success_count(fam, x) == 4
    assert repeated_gadget_decision(fam, x) == 1
    fam = SubsetFamily(6, (good,) * 3 + (bad,) * 5)
    assert repeated_gadget_decision(fam, x) == 0


@pytest.mark.parametrize("t", [16, 64])
def test_decision_error_bound(t):
    rng = np.random.default_rng(5)
    bound = math.exp(-t / 64)
    slack = 3 * math.sqrt(bound * (1 - bound) / 10_000)
    for w in (1, 2):
        x = BitString(tuple(1 if i < w else 0 for i in range(8)))
        assert monte_carlo_decision_error(x, t, 10_000, rng) <= bound + slack


def test_family_json_round_trip():
    fam = sample_family(5, 8, np.random.default_rng(0), seed=0)
    data = fam.to_json()
    assert {"n", "t", "seed", "subsets"} <= set(data)
    assert SubsetFamily.from_json(data).subsets == fam.subsets


def test_beta_weights_normalized():
    b = beta_weights(6, 0.4)
    assert abs(b.sum() - 1) < 1e-12
    # all-zero input carries cos^(2n)
    assert abs(b[0] - math.cos(0.4) ** 12) < 1e-15


def test_error_profile_matches_direct_count():
    rng = np.random.default_rng(9)
    fam = sample_family(5, 8, rng)
    prof = error_profile(fam, 0.3)
    beta = beta_weights(5, 0.3)
    want = 0.0
    for v in range(32):
        x = BitString.from_int(v, 5)
        if repeated_gadget_decision(fam, x) != exact_k(x, 1):
            want += beta[v]
    assert abs(prof.weighted_error - want) < 1e-12


def test_derandomize_min_below_mean():
    fam, errors = derandomize_search(6, 16, w_theta(6), 40, seed=2)
    assert fam.weighted_error <= float(np.mean(errors)) + 1e-15
    assert abs(fam.mean_weighted_error - float(np.mean(errors))) < 1e-12


def test_derandomize_small_case():
    fam = derandomize_family(4, 16, w_theta(4), 100, seed=0)
    assert fam.weighted_error < 0.2
    assert fam.seed == 0 and fam.t == 16


def test_average_error_within_budget():
    eta = 0.5
    t = choose_t(eta)
    _, errors = derandomize_search(8, t, w_theta(8), 50, seed=4)
    assert float(np.mean(errors)) <= eta


def test_derandomize_is_reproducible():
    a = derandomize_family(5, 16, w_theta(5), 20, seed=7)
    b = derandomize_family(5, 16, w_theta(5), 20, seed=7)
    assert a.subsets == b.subsets


def test_derandomize_refuses_large_n():
    with pytest.raises(Unsupported):
        derandomize_family(21, 8, 0.1, 1, seed=0)


def test_hamming_weight_accepts_sequences():
    assert hamming_weight((1, 0, 1)) == 2
    assert hamming_weight(bs("111")) == 3
