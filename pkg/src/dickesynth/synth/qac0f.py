"""Arbitrary-weight Dicke states with FanOut: parallel blocks plus exact OAA.

Pipeline (V):
  1. every block T_i gets R_y(2 theta*) with sin^2 theta* = k/n, and a weight
     oracle writes a_i = EXACT_k(T_i);
  2. s_j = a_j AND NOT(a_1 OR ... OR a_{j-1}) marks the first successful block;
  3. controlled on s_j, block T_j is swapped into Q;
  4. a_0 = OR(A) records that some block succeeded (probability gamma);
  5. R_y on the tuning qubit a puts amplitude sqrt(gamma~/gamma) on |1>, and
     b = EXACT_k(Q).
After V, Pr[a = b = 1] = gamma~ = sin^2(pi/(4l+2)), so l rounds of
[CZ on {a, b}, V (I - 2|0><0|) V^dagger] finish with probability 1.

Flag polarity: a_i = 1 marks success, so A is the success string itself and
the good branch is A != 0, i.e. a_0 = OR(A).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

from ..circuit import (
    Circuit,
    DepthConvention,
    Layer,
    RegisterAllocator,
    RegisterMap,
    ResourceReport,
    block_role,
    compose,
    inverse,
    merge_parallel,
    resource_report,
)
from ..errors import ResourceLimit
from ..gates import ControlledXor, FanOut, GlobalCZ, MultiToffoli, ProductReflection, WeightOracle, cnot, ry, x
from ..simulator.statevector import default_max_qubits
from .angles import round_target, rounds_for
from .threshold import exact_network_layers

MODES = ("paper", "desk")
ORACLES = ("weight", "explicit")


# ----------------------------------------------------------------- formulas

def p_good(n: int, k: int) -> float:
    """Weight-k probability of one block at sin^2 theta = k/n."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    if k in (0, n):
        return 1.0
    s = k / n
    return math.comb(n, k) * s ** k * (1 - s) ** (n - k)


def gamma(n: int, k: int, M: int) -> float:
    """Probability that at least one of M blocks succeeds."""
    if M < 1:
        raise ValueError("M must be positive")
    return 1 - (1 - p_good(n, k)) ** M


def choose_M(n: int, k: int, mode: str = "paper", floor: float = 0.5, max_M: int = 1 << 16) -> int:
    """Block count: ``paper`` starts at ceil(sqrt n) and grows until M p_good >= 1;
    ``desk`` is the smallest M with gamma >= floor."""
    p = p_good(n, k)
    if mode == "paper":
        M = math.isqrt(n - 1) + 1 if n > 1 else 1
        while M * p < 1:
            M += 1
        return M
    if mode == "desk":
        if not 0 < floor < 1:
            raise ValueError("gamma floor must lie in (0, 1)")
        M = 1
        while gamma(n, k, M) < floor:
            M += 1
            if M > max_M:
                raise ResourceLimit(f"no M <= {max_M} reaches gamma >= {floor}", {"p_good": p})
        return M
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


@dataclass(frozen=True)
class AmplitudeTuning:
    gamma: float
    gamma_tilde: float
    rounds: int
    phi: float  # R_y(2 phi) on the tuning qubit; sin^2 phi = gamma_tilde / gamma

    def __post_init__(self):
        if not 0 < self.gamma_tilde <= self.gamma + 1e-15 <= 1 + 1e-15:
            raise ValueError(f"need 0 < gamma_tilde <= gamma <= 1, got {self.gamma_tilde}, {self.gamma}")

    @property
    def amplitude(self) -> float:
        """Amplitude placed on |1> of the tuning qubit."""
        return math.sin(self.phi)

    def to_json(self) -> dict:
        return {"gamma": self.gamma, "gamma_tilde": self.gamma_tilde, "rounds": self.rounds, "phi": self.phi}


def tune_amplitude(gamma_value: float) -> AmplitudeTuning:
    """Smallest l with sin^2(pi/(4l+2)) <= gamma, and the angle that scales gamma down to it."""
    if not 0 < gamma_value <= 1:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma_value}")
    rounds, target = rounds_for(gamma_value, strict=False)
    ratio = min(1.0, target / gamma_value)
    return AmplitudeTuning(gamma_value, target, rounds, math.asin(math.sqrt(ratio)))


# ----------------------------------------------------------------- layout

@dataclass(frozen=True)
class BlockLayout:
    n: int
    k: int
    M: int
    registers: RegisterMap
    T: tuple[tuple[int, ...], ...]
    A: tuple[int, ...]
    S: tuple[int, ...]
    Q: tuple[int, ...]
    a0: int
    a: int
    b: int
    parallel_select: bool = False
    parallel_extract: bool = False
    oracle: str = "weight"
    select_copies: tuple[tuple[int, ...], ...] = ()
    scratch: tuple[tuple[int, ...], ...] = ()
    q_copies: tuple[tuple[int, ...], ...] = ()
    block_oracle_layers: tuple = field(default=(), repr=False, compare=False)
    b_oracle_layers: tuple = field(default=(), repr=False, compare=False)
    convention: DepthConvention = field(default_factory=DepthConvention)

    @classmethod
    def build(cls, n: int, k: int, M: int, *, parallel_select: bool = False, parallel_extract: bool = False,
              oracle: str = "weight", convention: DepthConvention | None = None) -> "BlockLayout":
        if n < 1 or not 1 <= k <= n or M < 1:
            raise ValueError(f"need n >= 1, 1 <= k <= n, M >= 1; got n={n}, k={k}, M={M}")
        if oracle not in ORACLES:
            raise ValueError(f"unknown oracle {oracle!r}")
        al = RegisterAllocator()
        T = tuple(al.register(f"T{i + 1}", n, block_role(i + 1)) for i in range(M))
        A = al.register("A", M, "flag")
        S = al.register("S", M, "selection")
        Q = al.register("Q", n, "output")
        a0 = al.register("a0", 1, "flag")[0]
        a = al.register("a", 1, "ancilla")[0]
        b = al.register("b", 1, "flag")[0]
        select_copies = ()
        if parallel_select:
            # a_i is read by s_i .. s_M; s_i itself uses the original
            select_copies = tuple(tuple(al.fresh(f"A_copies{i + 1}") for _ in range(M - 1 - i))
                                  for i in range(M))
        scratch = q_copies = ()
        if parallel_extract:
            scratch = tuple(al.register(f"R{j + 1}", n, "ancilla") for j in range(M))
            q_copies = tuple(al.register(f"C{j + 1}", n, "ancilla") for j in range(M))
        block_layers = b_layers = ()
        if oracle == "explicit":
            blocks = [exact_network_layers(al, T[i], k, A[i], group=f"oracle{i + 1}",
                                           copy_group=f"oracle{i + 1}").layers for i in range(M)]
            block_layers = tuple(tuple(l) for l in merge_parallel(blocks))
            b_layers = tuple(tuple(l) for l in
                             exact_network_layers(al, Q, k, b, group="oracleQ", copy_group="oracleQ").layers)
        return cls(n, k, M, al.build(), T, A, S, Q, a0, a, b, parallel_select, parallel_extract, oracle,
                   select_copies, scratch, q_copies, block_layers, b_layers, convention or DepthConvention())

    @property
    def qubit_count(self) -> int:
        return self.registers.qubit_count

    def dense_estimate(self) -> int:
        """Qubits the tracking simulator may hold in superposition at once."""
        return self.M * self.n + self.n + self.M + 1

    def to_json(self) -> dict:
        return {
            "n": self.n, "k": self.k, "M": self.M, "qubits": self.qubit_count,
            "dense_estimate": self.dense_estimate(), "oracle": self.oracle,
            "parallel_select": self.parallel_select, "parallel_extract": self.parallel_extract,
            "groups": {name: list(qs) for name, qs in self.registers.groups},
        }

    def circuit(self, layers) -> Circuit:
        return Circuit(self.qubit_count, tuple(Layer(tuple(l)) for l in layers if l), self.registers, "qac0f",
                       self.convention)


def check_layout_cap(layout: BlockLayout, max_qubits: int | None = None) -> None:
    cap = default_max_qubits() if max_qubits is None else max_qubits
    est = layout.dense_estimate()
    if est > cap:
        raise ResourceLimit(
            f"layout (n={layout.n}, k={layout.k}, M={layout.M}) needs up to {est} qubits in "
            f"superposition, cap is {cap}",
            {"dense_estimate": est, "cap": cap, "qubits": layout.qubit_count,
             "blocks": layout.M * layout.n, "Q": layout.n, "selection": layout.M, "tuning": 1})


# ----------------------------------------------------------------- stages

def block_angle(n: int, k: int) -> float:
    return math.asin(math.sqrt(k / n))


def synth_block_init(layout: BlockLayout) -> Circuit:
    theta = block_angle(layout.n, layout.k)
    rot = [ry(q, 2 * theta) for block in layout.T for q in block]
    if layout.oracle == "weight":
        flags = [[WeightOracle(layout.T[i], layout.A[i], (layout.k,)) for i in range(layout.M)]]
    else:
        flags = [list(l) for l in layout.block_oracle_layers]
    return layout.circuit([rot] + flags)


def synth_lsb_onehot(layout: BlockLayout) -> Circuit:
    """s_j = a_j AND NOT a_i for every i < j."""
    A, S, M = layout.A, layout.S, layout.M
    if not layout.parallel_select:
        return layout.circuit([[MultiToffoli(((A[j], True),) + tuple((A[i], False) for i in range(j)), S[j])]
                               for j in range(M)])
    copies = layout.select_copies
    fan = [FanOut(A[i], copies[i]) for i in range(M) if copies[i]]
    gates = []
    for j in range(M):
        # s_j reads a_j itself and copy number (j - i - 1) of each earlier a_i
        ctrls = ((A[j], True),) + tuple((copies[i][j - i - 1], False) for i in range(j))
        gates.append(MultiToffoli(ctrls, S[j]))
    return layout.circuit([fan, gates, list(fan)])


def synth_cswap_extract(layout: BlockLayout) -> Circuit:
    """Swap the selected block into Q (Q starts at |0>)."""
    T, S, Q, n = layout.T, layout.S, layout.Q, layout.n
    if not layout.parallel_extract:
        layers = []
        for j in range(layout.M):
            cx = [cnot(Q[i], T[j][i]) for i in range(n)]
            layers += [cx, [ControlledXor(S[j], tuple((T[j][i], Q[i]) for i in range(n)))], list(cx)]
        return layout.circuit(layers)
    R, C = layout.scratch, layout.q_copies
    swap_in = [[cnot(R[j][i], T[j][i]) for j in range(layout.M) for i in range(n)],
               [ControlledXor(S[j], tuple((T[j][i], R[j][i]) for i in range(n))) for j in range(layout.M)],
               [cnot(R[j][i], T[j][i]) for j in range(layout.M) for i in range(n)]]
    # at most one R_j is non-zero, so Q_i = OR_j R_j[i]
    gather = [[x(q) for q in Q], [MultiToffoli(tuple((R[j][i], False) for j in range(layout.M)), Q[i])
                                  for i in range(n)]]
    fan = [FanOut(Q[i], tuple(C[j][i] for j in range(layout.M))) for i in range(n)]
    clear = [ControlledXor(S[j], tuple((C[j][i], R[j][i]) for i in range(n))) for j in range(layout.M)]
    return layout.circuit(swap_in + gather + [fan, clear, list(fan)])


def synth_good_flag(layout: BlockLayout) -> Circuit:
    """a_0 = OR(A), as NOT of an all-negative Toffoli."""
    return layout.circuit([[x(layout.a0)], [MultiToffoli(tuple((q, False) for q in layout.A), layout.a0)]])


def synth_tuning(layout: BlockLayout, tuning: AmplitudeTuning) -> Circuit:
    if layout.oracle == "weight":
        flag = [[WeightOracle(layout.Q, layout.b, (layout.k,))]]
    else:
        flag = [list(l) for l in layout.b_oracle_layers]
    return layout.circuit([[ry(layout.a, 2 * tuning.phi)]] + flag)


def synth_preparation(layout: BlockLayout, tuning: AmplitudeTuning) -> Circuit:
    """V: everything before amplification."""
    return compose(synth_block_init(layout), synth_lsb_onehot(layout), synth_cswap_extract(layout),
                   synth_good_flag(layout), synth_tuning(layout, tuning))


def oaa_round(layout: BlockLayout, prep: Circuit) -> Circuit:
    mark = layout.circuit([[GlobalCZ((layout.a, layout.b))]])
    zero = ProductReflection(tuple((q, (1, 0)) for q in range(layout.qubit_count)))
    return compose(mark, inverse(prep), layout.circuit([[zero]]), prep)


@dataclass(frozen=True)
class QAC0fSynthesis:
    circuit: Circuit
    report: ResourceReport
    layout: BlockLayout
    tuning: AmplitudeTuning
    preparation: Circuit

    def __iter__(self) -> Iterator:
        return iter((self.circuit, self.report))


def synth_dicke_qac0f(n: int, k: int, M: int | None = None, *, mode: str = "paper", gamma_floor: float = 0.5,
                      parallel_select: bool = False, parallel_extract: bool = False, oracle: str = "weight",
                      max_qubits: int | None = None, convention: DepthConvention | None = None) -> QAC0fSynthesis:
    """Full pipeline: V followed by the tuned number of OAA rounds.

    The Dicke state lands on register ``Q``; every other register holds junk
    that is independent of the branch.
    """
    if M is None:
        M = choose_M(n, k, mode, gamma_floor)
    layout = BlockLayout.build(n, k, M, parallel_select=parallel_select,
                               parallel_extract=parallel_extract, oracle=oracle, convention=convention)
    check_layout_cap(layout, max_qubits)
    tuning = tune_amplitude(gamma(n, k, M))
    prep = synth_preparation(layout, tuning)
    c = compose(prep, *(oaa_round(layout, prep) for _ in range(tuning.rounds)))
    notes = [f"M={M}", f"oaa_rounds={tuning.rounds}", f"gamma={tuning.gamma!r}",
             f"gamma_tilde={tuning.gamma_tilde!r}", f"oracle={oracle}"]
    if oracle == "weight":
        notes.append(f"weight oracle counted as depth {c.convention.oracle_depth}")
    return QAC0fSynthesis(c, resource_report(c, notes), layout, tuning, prep)


def layout_report(result: QAC0fSynthesis) -> dict:
    return {"layout": result.layout.to_json(), "tuning": result.tuning.to_json(),
            "resources": result.report.to_json()}


def pipeline_stages(layout: BlockLayout, tuning: AmplitudeTuning) -> list[tuple[str, Circuit]]:
    return [("block_init", synth_block_init(layout)), ("lsb_onehot", synth_lsb_onehot(layout)),
            ("cswap_extract", synth_cswap_extract(layout)), ("good_flag", synth_good_flag(layout)),
            ("tuning", synth_tuning(layout, tuning))]


def gamma_lower_bound(n: int, k: int, M: int) -> float:
    return 1 - math.exp(-M * p_good(n, k))


__all__ = [
    "AmplitudeTuning", "BlockLayout", "QAC0fSynthesis", "check_layout_cap", "choose_M", "gamma",
    "gamma_lower_bound", "layout_report", "oaa_round", "p_good", "pipeline_stages", "round_target",
    "synth_block_init", "synth_cswap_extract", "synth_dicke_qac0f", "synth_good_flag", "synth_lsb_onehot",
    "synth_preparation", "synth_tuning", "tune_amplitude",
]
