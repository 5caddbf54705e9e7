"""Rotation angle and Grover round selection for exact amplification."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from ..errors import NoSolution

RESIDUAL_TOL = 1e-12


def binomial_overlap(n: int, k: int, theta: float) -> float:
    """|<eta_theta|D^n_k>|^2 = C(n,k) sin^{2k} cos^{2(n-k)}."""
    s2 = math.sin(theta) ** 2
    return _overlap_s(n, k, s2)


def _overlap_s(n: int, k: int, s: float) -> float:
    return math.comb(n, k) * s ** k * (1 - s) ** (n - k)


def amplified_probability(c: float, rounds: int) -> float:
    """Success probability after ``rounds`` iterations from initial probability c."""
    return math.sin((2 * rounds + 1) * math.asin(math.sqrt(c))) ** 2


def round_target(rounds: int) -> float:
    """Initial probability that ``rounds`` iterations lift exactly to 1."""
    return math.sin(math.pi / (4 * rounds + 2)) ** 2


def rounds_for(limit: float, *, strict: bool) -> tuple[int, float]:
    """Smallest l >= 1 with round_target(l) below ``limit`` (or equal, if not strict)."""
    if limit <= 0:
        raise NoSolution(f"no round count reaches a target below {limit}")
    rounds = 1
    while True:
        c = round_target(rounds)
        if c < limit or (not strict and c <= limit):
            return rounds, c
        rounds += 1


def grover_rounds(k: int) -> tuple[int, float]:
    """(l, c) with l minimal such that c = sin^2(pi/(4l+2)) < e^{-k}."""
    if k < 1:
        raise ValueError("grover_rounds needs k >= 1")
    return rounds_for(math.exp(-k), strict=True)


@dataclass(frozen=True)
class AngleSolution:
    n: int
    k: int
    theta: float
    c_target: float
    grover_rounds: int | None = None
    branch: str = "increasing"
    residual: float = 0.0

    def __post_init__(self):
        if not 0 < self.theta < math.pi / 2:
            raise ValueError(f"theta {self.theta} outside (0, pi/2)")
        if self.residual >= RESIDUAL_TOL:
            raise ValueError(f"residual {self.residual} is not below {RESIDUAL_TOL}")
        if self.grover_rounds is not None and abs(round_target(self.grover_rounds) - self.c_target) > 1e-15:
            raise ValueError("c_target does not match the round count")

    @property
    def sin2(self) -> float:
        return math.sin(self.theta) ** 2

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "theta": self.theta, "c_target": self.c_target,
                "grover_rounds": self.grover_rounds, "branch": self.branch, "residual": self.residual}


def solve_theta(n: int, k: int, c_target: float, tol: float = 1e-13) -> AngleSolution:
    """Root of binomial_overlap(n, k, theta) = c_target on the rising branch.

    Bisection runs on s = sin^2 theta over (0, k/n), where the overlap
    increases monotonically from 0 to its maximum.
    """
    if not 1 <= k < n:
        raise NoSolution(f"need 1 <= k < n, got n={n}, k={k}")
    peak = _overlap_s(n, k, k / n)
    if not 0 < c_target < peak:
        raise NoSolution(f"c_target={c_target} is outside (0, {peak}) for n={n}, k={k}")
    lo, hi = 0.0, k / n
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _overlap_s(n, k, mid) < c_target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-17:
            break
    best = min((lo, hi), key=lambda s: abs(_overlap_s(n, k, s) - c_target))
    theta = math.asin(math.sqrt(best))
    residual = abs(binomial_overlap(n, k, theta) - c_target)
    if residual >= max(tol, RESIDUAL_TOL):
        raise NoSolution(f"bisection stalled with residual {residual}")
    return AngleSolution(n, k, theta, c_target, residual=residual)


def dicke_angles(n: int, k: int) -> AngleSolution:
    rounds, c = grover_rounds(k)
    return replace(solve_theta(n, k, c), grover_rounds=rounds)
