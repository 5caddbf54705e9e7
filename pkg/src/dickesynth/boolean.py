"""Boolean layer: EXACT/THRESHOLD oracles, the partition recursion and the
randomized EXACT_1 gadget with its repetition and derandomization helpers.

Indices are 0-based throughout.  ``TH_k(x) = 1`` iff ``|x| <= k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, Unsupported

DERANDOMIZE_MAX_N = 20


# ----------------------------------------------------------------- bit strings

@dataclass(frozen=True)
class BitString:
    """Fixed-length bit vector; ``bits[i]`` is x_i."""

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise DimensionError(f"bits must be 0/1, got {bits}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_int(cls, value: int, n: int) -> "BitString":
        if not 0 <= value < (1 << n):
            raise DimensionError(f"{value} does not fit in {n} bits")
        return cls(tuple((value >> i) & 1 for i in range(n)))

    @classmethod
    def from_str(cls, text: str) -> "BitString":
        """Character i is x_i, so ``"1100"`` has x_0 = x_1 = 1."""
        return cls(tuple(int(c) for c in text))

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def weight(self) -> int:
        return sum(self.bits)

    def to_int(self) -> int:
        return sum(b << i for i, b in enumerate(self.bits))

    def restrict(self, positions: Sequence[int]) -> "BitString":
        return BitString(tuple(self.bits[p] for p in positions))

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


def _bits(x) -> tuple[int, ...]:
    if isinstance(x, BitString):
        return x.bits
    if isinstance(x, str):
        return BitString.from_str(x).bits
    return tuple(int(b) for b in x)


def hamming_weight(x) -> int:
    return sum(_bits(x))


def exact_k(x, k: int) -> int:
    return int(hamming_weight(x) == k)


def threshold_k(x, k: int) -> int:
    """1 iff ``|x| <= k``; constant 0 for negative k."""
    return int(hamming_weight(x) <= k)


# ----------------------------------------------------------------- recursion

def log_width(n: int) -> int:
    """Number of partition levels: bit positions needed to index ``n`` items."""
    return max(1, math.ceil(math.log2(n))) if n >= 2 else 1


def partition_sets(n: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """``[(S_{i,0}, S_{i,1}) for i in range(log_width(n))]`` over ``{0..n-1}``.

    ``S_{i,b}`` holds the indices whose bit i equals b.  For n < 2 the single
    trivial split is returned.
    """
    if n < 2:
        return [(tuple(range(n)), ())]
    return [
        (tuple(j for j in range(n) if not (j >> i) & 1), tuple(j for j in range(n) if (j >> i) & 1))
        for i in range(log_width(n))
    ]


@lru_cache(maxsize=None)
def _th_rec(bits: tuple[int, ...], k: int) -> int:
    if k < 0:
        return 0
    if k >= len(bits):
        return 1
    if k == 0:
        return int(not any(bits))
    for s0, s1 in partition_sets(len(bits)):
        x0 = tuple(bits[j] for j in s0)
        x1 = tuple(bits[j] for j in s1)
        clause = (_th_rec(x0, 0) or _th_rec(x1, 0)
                  or any(_th_rec(x0, kk) and _th_rec(x1, k - kk) for kk in range(1, k)))
        if not clause:
            return 0
    return 1


def threshold_recursion_eval(x, k: int) -> int:
    """TH_k through the partition recursion rather than by counting."""
    return _th_rec(_bits(x), k)


# ----------------------------------------------------------------- gadget

def _subset_mask(subset: Iterable[int]) -> int:
    m = 0
    for j in subset:
        m |= 1 << j
    return m


def gadget_eval(subset: Iterable[int], x) -> int:
    """(AND of NOT x_i over S) AND (OR of x_j over the complement of S)."""
    bits = _bits(x)
    s = set(subset)
    zeros_on_s = all(not bits[i] for i in s)
    ones_off_s = any(bits[j] for j in range(len(bits)) if j not in s)
    return int(zeros_on_s and ones_off_s)


def choose_t(epsilon: float) -> int:
    """Smallest multiple of 8 that is at least ``ceil(64 ln(1/epsilon))``."""
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    # the 1e-9 keeps 64*ln(e) from rounding up to 65
    base = max(1, math.ceil(64 * math.log(1 / epsilon) - 1e-9))
    return -(-base // 8) * 8


def decision_threshold(t: int) -> int:
    """Smallest success count c with ``c > 3t/8``."""
    return (3 * t) // 8 + 1


@dataclass(frozen=True)
class SubsetFamily:
    n: int
    subsets: tuple[tuple[int, ...], ...]
    seed: int | None = None
    weighted_error: float | None = None
    mean_weighted_error: float | None = None

    def __post_init__(self):
        subsets = tuple(tuple(sorted(int(j) for j in s)) for s in self.subsets)
        if not subsets:
            raise ValueError("a subset family needs t >= 1 subsets")
        for s in subsets:
            if len(set(s)) != len(s) or any(not 0 <= j < self.n for j in s):
                raise ValueError(f"subset {s} is not a subset of range({self.n})")
        object.__setattr__(self, "subsets", subsets)

    @property
    def t(self) -> int:
        return len(self.subsets)

    @property
    def masks(self) -> np.ndarray:
        return np.array([_subset_mask(s) for s in self.subsets], dtype=np.int64)

    def complement(self, i: int) -> tuple[int, ...]:
        s = set(self.subsets[i])
        return tuple(j for j in range(self.n) if j not in s)

    def to_json(self) -> dict:
        out = {"n": self.n, "t": self.t, "seed": self.seed, "subsets": [list(s) for s in self.subsets]}
        if self.weighted_error is not None:
            out["weighted_error"] = self.weighted_error
        if self.mean_weighted_error is not None:
            out["mean_weighted_error"] = self.mean_weighted_error
        return out

    @classmethod
    def from_json(cls, data: dict) -> "SubsetFamily":
        fam = cls(int(data["n"]), tuple(tuple(s) for s in data["subsets"]), data.get("seed"),
                  data.get("weighted_error"), data.get("mean_weighted_error"))
        if "t" in data and int(data["t"]) != fam.t:
            raise ValueError(f"declared t={data['t']} but {fam.t} subsets given")
        return fam


def sample_family(n: int, t: int, rng: np.random.Generator, seed: int | None = None) -> SubsetFamily:
    """Each index joins each subset independently with probability 1/2."""
    picks = rng.integers(0, 2, size=(t, n), dtype=np.int8).astype(bool)
    return SubsetFamily(n, tuple(tuple(np.flatnonzero(row).tolist()) for row in picks), seed)


def success_count(family: SubsetFamily, x) -> int:
    bits = _bits(x)
    return sum(gadget_eval(s, bits) for s in family.subsets)


def repeated_gadget_decision(family: SubsetFamily, x) -> int:
    """1 iff more than 3t/8 of the gadgets accept."""
    return int(8 * success_count(family, x) > 3 * family.t)


# ----------------------------------------------------------------- vectorized

def input_weights(n: int) -> np.ndarray:
    xs = np.arange(1 << n, dtype=np.int64)
    w = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        w += (xs >> i) & 1
    return w


def _accept_counts(masks: np.ndarray, n: int) -> np.ndarray:
    """counts[x] = number of gadgets accepting x, for every x in {0,1}^n."""
    full = (1 << n) - 1
    xs = np.arange(1 << n, dtype=np.int64)
    counts = np.zeros(1 << n, dtype=np.int64)
    for m in masks:
        counts += ((xs & m) == 0) & ((xs & (full ^ int(m))) != 0)
    return counts


def gadget_matrix(family: SubsetFamily) -> np.ndarray:
    """Boolean array [2^n, t]: entry (x, i) is gadget i on input x."""
    full = (1 << family.n) - 1
    xs = np.arange(1 << family.n, dtype=np.int64)[:, None]
    m = family.masks[None, :]
    return ((xs & m) == 0) & ((xs & (full ^ m)) != 0)


def beta_weights(n: int, theta: float) -> np.ndarray:
    """|beta_x|^2 = cos^{2(n-|x|)} sin^{2|x|} for the product state of R_y(2 theta)."""
    w = input_weights(n)
    c2, s2 = math.cos(theta) ** 2, math.sin(theta) ** 2
    return np.power(c2, n - w) * np.power(s2, w)


@dataclass(frozen=True)
class GadgetErrorProfile:
    n: int
    delta: np.ndarray = field(repr=False)
    weighted_error: float

    def __post_init__(self):
        if not -1e-12 <= self.weighted_error <= 1 + 1e-12:
            raise ValueError(f"weighted error {self.weighted_error} outside [0, 1]")

    @property
    def error_inputs(self) -> list[int]:
        return np.flatnonzero(self.delta).tolist()


def _check_enumerable(n: int) -> None:
    if n > DERANDOMIZE_MAX_N:
        raise Unsupported(f"exhaustive enumeration over 2^{n} inputs is limited to n <= {DERANDOMIZE_MAX_N}")


def _profile_from_masks(masks: np.ndarray, n: int, beta2: np.ndarray,
                        target: np.ndarray) -> tuple[np.ndarray, float]:
    decision = 8 * _accept_counts(masks, n) > 3 * len(masks)
    delta = decision != target
    return delta, float(beta2[delta].sum())


def error_profile(family: SubsetFamily, theta: float) -> GadgetErrorProfile:
    _check_enumerable(family.n)
    target = input_weights(family.n) == 1
    delta, err = _profile_from_masks(family.masks, family.n, beta_weights(family.n, theta), target)
    return GadgetErrorProfile(family.n, delta, err)


def derandomize_search(n: int, t: int, theta: float, trials: int,
                       seed: int) -> tuple[SubsetFamily, np.ndarray]:
    """Sample ``trials`` families; return the best one and every weighted error."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    _check_enumerable(n)
    rng = np.random.default_rng(seed)
    beta2 = beta_weights(n, theta)
    target = input_weights(n) == 1
    errors = np.empty(trials)
    best = None
    for trial in range(trials):
        picks = rng.integers(0, 2, size=(t, n), dtype=np.int8).astype(bool)
        masks = (picks.astype(np.int64) << np.arange(n, dtype=np.int64)).sum(axis=1)
        _, errors[trial] = _profile_from_masks(masks, n, beta2, target)
        if best is None or errors[trial] < errors[best[0]]:
            best = (trial, picks)
    subsets = tuple(tuple(np.flatnonzero(row).tolist()) for row in best[1])
    family = SubsetFamily(n, subsets, seed, float(errors[best[0]]), float(errors.mean()))
    return family, errors


def derandomize_family(n: int, t: int, theta: float, trials: int, seed: int) -> SubsetFamily:
    """Lowest weighted-error family among ``trials`` seeded samples."""
    return derandomize_search(n, t, theta, trials, seed)[0]


# ----------------------------------------------------------------- statistics

def exact_acceptance(x) -> Fraction:
    """Pr over all 2^n subsets S that the gadget accepts x, as a fraction."""
    bits = _bits(x)
    n = len(bits)
    xv = sum(b << i for i, b in enumerate(bits))
    full = (1 << n) - 1
    hits = sum(1 for m in range(1 << n) if (xv & m) == 0 and (xv & (full ^ m)) != 0)
    return Fraction(hits, 1 << n)


def monte_carlo_acceptance(x, samples: int, rng: np.random.Generator) -> float:
    bits = np.array(_bits(x), dtype=bool)
    s = rng.integers(0, 2, size=(samples, len(bits)), dtype=np.int8).astype(bool)
    ok = ~(s & bits).any(axis=1) & (~s & bits).any(axis=1)
    return float(ok.mean())


def monte_carlo_decision_error(x, t: int, trials: int, rng: np.random.Generator) -> float:
    """Fraction of random t-families whose decision on x differs from EXACT_1."""
    bits = np.array(_bits(x), dtype=bool)
    want = bool(bits.sum() == 1)
    s = rng.integers(0, 2, size=(trials, t, len(bits)), dtype=np.int8).astype(bool)
    ok = ~(s & bits).any(axis=2) & (~s & bits).any(axis=2)
    decision = 8 * ok.sum(axis=1) > 3 * t
    return float(np.mean(decision != want))
