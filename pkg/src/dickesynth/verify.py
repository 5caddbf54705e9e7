"""Reference states, equivalence checks and pass/fail verdicts."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .boolean import BitString, monte_carlo_decision_error
from .circuit import Circuit, ResourceReport
from .errors import DimensionError, Unsupported
from .simulator import (
    BasisBatch,
    HybridState,
    StateVector,
    all_inputs,
    is_classical,
)
from .simulator.statevector import default_max_qubits

EXACT_THRESHOLD = 1 - 1e-9
TRUTH_TABLE_MAX_N = 12


def dicke_state(n: int, k: int) -> StateVector:
    """Uniform superposition over the weight-k basis states (bit i = qubit i)."""
    if not 0 <= k <= n:
        raise DimensionError(f"need 0 <= k <= n, got n={n}, k={k}")
    idx = np.arange(1 << n, dtype=np.int64)
    weight = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        weight += (idx >> i) & 1
    amps = np.where(weight == k, 1.0, 0.0).astype(np.complex128)
    amps /= math.sqrt(math.comb(n, k))
    return StateVector(amps, n)


def w_state(n: int) -> StateVector:
    return dicke_state(n, 1)


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    measured: float | None
    threshold: float | None
    runtime: float = 0.0
    comparison: str = ">="
    details: Mapping = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "measured": self.measured,
                "threshold": self.threshold, "comparison": self.comparison,
                "runtime": round(self.runtime, 6), "details": dict(self.details)}

    def json_line(self, include_runtime: bool = True) -> str:
        d = self.to_json()
        if not include_runtime:
            d.pop("runtime")
        return json.dumps(d, sort_keys=True)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        m = "-" if self.measured is None else f"{self.measured:.12g}"
        t = "-" if self.threshold is None else f"{self.comparison} {self.threshold:.12g}"
        return f"{status}  {self.name:<44} {m:>20} {t}"


def _compare(measured: float, threshold: float, comparison: str) -> bool:
    if comparison == ">=":
        return measured >= threshold
    if comparison == "<=":
        return measured <= threshold
    if comparison == "<":
        return measured < threshold
    if comparison == "==":
        return measured == threshold
    raise ValueError(f"unknown comparison {comparison!r}")


def make_verdict(name: str, measured: float, threshold: float, comparison: str = ">=",
                 started: float | None = None, **details) -> Verdict:
    runtime = time.perf_counter() - started if started is not None else 0.0
    return Verdict(name, _compare(measured, threshold, comparison), measured, threshold, runtime,
                   comparison, details)


def summary_table(verdicts: Iterable[Verdict]) -> str:
    return "\n".join(v.summary() for v in verdicts)


# ----------------------------------------------------------------- truth tables

def _output_qubit(circuit: Circuit) -> int:
    outs = circuit.registers.with_role("output")
    if len(outs) != 1:
        raise DimensionError("truth_table_check needs exactly one output qubit")
    return outs[0]


def _input_qubits(circuit: Circuit, n: int) -> tuple[int, ...]:
    if circuit.registers.has_group("x"):
        xs = circuit.registers.group("x")
    else:
        xs = circuit.registers.with_role("system")
    if len(xs) != n:
        raise DimensionError(f"circuit has {len(xs)} input qubits, expected {n}")
    return xs


def truth_table_check(circuit: Circuit, oracle: Callable[[BitString], int], n: int,
                      name: str = "truth_table") -> Verdict:
    """Run every basis input (ancillas at |0>) and compare the output bit with ``oracle``.

    Also checks that inputs come back unchanged, every other qubit returns to
    0 and no phase is left behind.  Permutation circuits are evaluated in one
    batch; anything else falls back to per-input state simulation.
    """
    if n > TRUTH_TABLE_MAX_N:
        raise Unsupported(f"truth tables are limited to n <= {TRUTH_TABLE_MAX_N}")
    start = time.perf_counter()
    xs = _input_qubits(circuit, n)
    out = _output_qubit(circuit)
    inputs = all_inputs(n)
    want = np.array([oracle(BitString(tuple(int(b) for b in row))) for row in inputs], dtype=bool)
    rest = [q for q in range(circuit.qubit_count) if q not in set(xs) and q != out]
    if is_classical(circuit):
        bits = np.zeros((len(inputs), circuit.qubit_count), dtype=bool)
        bits[:, list(xs)] = inputs
        batch = BasisBatch(bits).apply_circuit(circuit)
        got = batch.bits[:, out]
        inputs_kept = bool(np.all(batch.bits[:, list(xs)] == inputs))
        clean = not batch.bits[:, rest].any()
        phase_ok = bool(np.allclose(batch.phase, 1, atol=1e-12))
    else:
        got = np.zeros(len(inputs), dtype=bool)
        inputs_kept = clean = phase_ok = True
        for r, row in enumerate(inputs):
            s = HybridState.basis(circuit.qubit_count, [xs[i] for i in range(n) if row[i]])
            s.apply_circuit(circuit)
            bits, amps = s.terms()
            if len(amps) != 1:
                clean = False
                continue
            got[r] = bits[0, out]
            inputs_kept &= bool(np.all(bits[0, list(xs)] == row))
            clean &= not bits[0, rest].any()
            phase_ok &= abs(amps[0] - 1) < 1e-9
    mismatches = int(np.sum(got != want))
    passed = mismatches == 0 and inputs_kept and clean and phase_ok
    return Verdict(name, passed, float(mismatches), 0.0, time.perf_counter() - start, "==",
                   {"inputs": len(inputs), "inputs_preserved": inputs_kept, "ancillas_restored": clean,
                    "phase_free": phase_ok})


# ----------------------------------------------------------------- fidelity

def run(circuit: Circuit, max_qubits: int | None = None) -> HybridState:
    """Simulate from |0...0> with classical tracking of ancillas."""
    return HybridState(circuit.qubit_count, max_dense=max_qubits).apply_circuit(circuit)


def dicke_verdict(circuit: Circuit, n: int, k: int, register: Sequence[int] | None = None, *,
                  threshold: float = EXACT_THRESHOLD, name: str | None = None,
                  state: HybridState | None = None, require_clean: bool = True) -> Verdict:
    """Reduced overlap of ``register`` with |D^n_k>, plus the probability that
    every other qubit is back at |0> (skipped when ``require_clean`` is off,
    for constructions that leave junk)."""
    start = time.perf_counter()
    if register is None:
        register = circuit.registers.group("x") if circuit.registers.has_group("x") else tuple(range(n))
    register = list(register)
    s = state if state is not None else run(circuit)
    target = dicke_state(n, k)
    overlap = s.reduced_overlap(register, target)
    others = [q for q in range(circuit.qubit_count) if q not in set(register)]
    restored = s.probability({q: 0 for q in others}) if others else 1.0
    measured = min(overlap, restored) if require_clean else overlap
    return Verdict(name or f"dicke(n={n},k={k})", measured >= threshold, measured, threshold,
                   time.perf_counter() - start, ">=",
                   {"overlap": overlap, "ancillas_restored": restored, "norm": s.norm(),
                    "peak_dense": s.peak_dense, "qubits": circuit.qubit_count})


# ----------------------------------------------------------------- statistics

def gadget_statistics(n: int, t: int, trials: int, seed: int,
                      weights: Sequence[int] = (0, 1, 2, 3)) -> Verdict:
    """Monte Carlo decision error per |x|, against exp(-t/64) plus 3 sigma."""
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    bound = math.exp(-t / 64)
    slack = 3 * math.sqrt(bound * (1 - bound) / trials)
    errors = {}
    for w in weights:
        if w > n:
            continue
        x = tuple(1 if i < w else 0 for i in range(n))
        errors[w] = monte_carlo_decision_error(x, t, trials, rng)
    worst = max(errors.values())
    return Verdict(f"gadget_statistics(n={n},t={t})", worst <= bound + slack, worst, bound + slack,
                   time.perf_counter() - start, "<=",
                   {"bound": bound, "slack": slack, "trials": trials, "seed": seed,
                    "errors": {str(w): e for w, e in errors.items()}})


# ----------------------------------------------------------------- resources

def depth_flatness(depths: Mapping[int, int]) -> bool:
    return len(set(depths.values())) <= 1


def fit_envelope(counts: Mapping[int, int], k: int) -> float:
    """Smallest C with count <= C n^{k+1} on the given points."""
    return max(c / n ** (k + 1) for n, c in counts.items())


def resource_verdict(reports: Mapping[int, ResourceReport], k: int, model: str,
                     name: str | None = None) -> Verdict:
    """Depth flatness plus an ancilla envelope C n^{k+1}.

    C is fitted on the smaller half of the sweep and then checked on every
    point, and ancilla counts must not shrink as n grows.  This is a sanity
    envelope over the sampled sizes, not an asymptotic statement.
    """
    start = time.perf_counter()
    ns = sorted(reports)
    depths = {n: reports[n].depth for n in ns}
    ancillas = {n: reports[n].ancilla_count for n in ns}
    fit_on = ns[: max(1, (len(ns) + 1) // 2)]
    C = fit_envelope({n: ancillas[n] for n in fit_on}, k)
    within = all(ancillas[n] <= C * n ** (k + 1) for n in ns)
    monotone = all(ancillas[a] <= ancillas[b] for a, b in zip(ns, ns[1:]))
    flat = depth_flatness(depths)
    ratio = max(ancillas[n] / (C * n ** (k + 1)) for n in ns) if C > 0 else 0.0
    return Verdict(name or f"resources({model},k={k})", flat and within and monotone, ratio, 1.0,
                   time.perf_counter() - start, "<=",
                   {"depths": {str(n): d for n, d in depths.items()},
                    "ancillas": {str(n): a for n, a in ancillas.items()},
                    "envelope_C": C, "fitted_on": fit_on, "depth_flat": flat,
                    "ancillas_monotone": monotone, "asymptotic": False})


# ----------------------------------------------------------------- suites

SUITES = ("boolean", "exact", "grover", "approx", "gadget", "qac0f", "formula", "all")


def suite_boolean(nmax: int = 8, recursion_nmax: int = 10) -> list[Verdict]:
    from .boolean import exact_k, threshold_k, threshold_recursion_eval
    from .synth.threshold import synth_exact_circuit, synth_threshold_circuit

    out = []
    start = time.perf_counter()
    bad = 0
    for n in range(2, max(recursion_nmax, 2) + 1):
        for k in range(0, 4):
            for v in range(1 << n):
                x = BitString.from_int(v, n)
                bad += threshold_recursion_eval(x, k) != threshold_k(x, k)
    out.append(make_verdict(f"recursion==threshold(n<={recursion_nmax})", bad, 0, "==", start))
    for n in range(2, nmax + 1):
        for k in range(0, 3):
            out.append(truth_table_check(synth_threshold_circuit(n, k), lambda x, k=k: threshold_k(x, k), n,
                                         f"threshold_circuit(n={n},k={k})"))
            out.append(truth_table_check(synth_exact_circuit(n, k), lambda x, k=k: exact_k(x, k), n,
                                         f"exact_circuit(n={n},k={k})"))
    return out


def suite_exact(nmax: int = 8, ks: Sequence[int] = (1, 2, 3), flat_nmax: int = 10) -> list[Verdict]:
    """Fidelity for every (n, k) up to nmax, plus depth flatness for k in
    {1, 2} over n = k+1..flat_nmax (synthesis only, no simulation)."""
    from .synth.dicke_qac0 import synth_dicke_qac0

    out = []
    for k in (1, 2):
        start = time.perf_counter()
        depths = {n: synth_dicke_qac0(n, k).report.depth for n in range(k + 1, flat_nmax + 1)}
        out.append(make_verdict(f"dicke_qac0_depth_flat(k={k},n<={flat_nmax})", len(set(depths.values())), 1,
                                "==", start, depths={str(n): d for n, d in depths.items()}))
    for k in ks:
        reports = {}
        for n in range(max(3, k + 1), nmax + 1):
            res = synth_dicke_qac0(n, k)
            out.append(dicke_verdict(res.circuit, n, k, name=f"dicke_qac0(n={n},k={k})"))
            reports[n] = res.report
        if len(reports) > 1:
            out.append(resource_verdict(reports, k, "qac0", f"dicke_qac0_resources(k={k})"))
    return out


def suite_grover() -> list[Verdict]:
    from .synth.angles import amplified_probability, dicke_angles, grover_rounds

    out = []
    start = time.perf_counter()
    l1, c1 = grover_rounds(1)
    out.append(make_verdict("grover_rounds(1)", l1, 1, "==", start, c_target=c1))
    out.append(make_verdict("c_target(k=1)", abs(c1 - 0.25), 1e-15, "<=", start))
    l2, c2 = grover_rounds(2)
    out.append(make_verdict("grover_rounds(2)", l2, 2, "==", start, c_target=c2))
    out.append(make_verdict("c_target(k=2)", abs(c2 - math.sin(math.pi / 10) ** 2), 1e-15, "<=", start))
    worst = 0.0
    for n in range(2, 30):
        for k in range(1, min(n, 5)):
            a = dicke_angles(n, k)
            worst = max(worst, a.residual, abs(amplified_probability(a.c_target, a.grover_rounds) - 1))
    out.append(make_verdict("solve_theta_residual_and_amplification", worst, 1e-12, "<", start))
    return out


def suite_approx(ns: Sequence[int] = (4, 6, 8), epsilon: float = 0.5, trials: int = 200,
                 seed: int = 20240601) -> list[Verdict]:
    from .boolean import choose_t, derandomize_family
    from .synth.w_approx import synth_w_approx, w_theta

    out = []
    ancillas = {}
    t = choose_t(epsilon / 9)
    for n in ns:
        start = time.perf_counter()
        fam = derandomize_family(n, t, w_theta(n), trials, seed)
        res = synth_w_approx(n, epsilon, fam)
        s = run(res.circuit)
        fid = s.product_fidelity(list(res.circuit.registers.group("x")), w_state(n))
        ancillas[n] = res.report.ancilla_count
        out.append(make_verdict(f"w_approx(n={n},eps={epsilon})", fid, 1 - epsilon, ">=", start,
                                weighted_error=fam.weighted_error, t=t, seed=seed,
                                ancillas=res.report.ancilla_count))
    start = time.perf_counter()
    out.append(make_verdict("w_approx_constant_ancillas", len(set(ancillas.values())), 1, "==", start,
                            ancillas={str(n): a for n, a in ancillas.items()}))
    return out


def suite_gadget(seed: int = 7, trials: int = 10_000) -> list[Verdict]:
    from fractions import Fraction

    from .boolean import exact_acceptance

    out = []
    start = time.perf_counter()
    bad = 0
    for n in range(1, 11):
        for v in range(1 << n):
            x = BitString.from_int(v, n)
            want = Fraction(0) if x.weight == 0 else Fraction(1, 1 << x.weight)
            bad += exact_acceptance(x) != want
    out.append(make_verdict("gadget_exhaustive_acceptance(n<=10)", bad, 0, "==", start))
    for t in (16, 64):
        out.append(gadget_statistics(8, t, trials, seed))
    return out


QAC0F_GRID = ((3, 1, 2), (3, 1, 3), (4, 1, 3), (4, 2, 3))


def qac0f_point(n: int, k: int, M: int, max_qubits: int | None = None) -> list[Verdict]:
    from .simulator import conditional_overlap
    from .synth.qac0f import gamma, synth_dicke_qac0f

    res = synth_dicke_qac0f(n, k, M, max_qubits=max_qubits)
    L = res.layout
    start = time.perf_counter()
    pre = run(res.preparation, max_qubits)
    g = gamma(n, k, M)
    p = pre.probability({L.a0: 1})
    cond = conditional_overlap(pre, L.Q, dicke_state(n, k), {L.a0: 1})
    pab = pre.probability({L.a: 1, L.b: 1})
    tag = f"(n={n},k={k},M={M})"
    out = [make_verdict(f"qac0f_gamma{tag}", abs(p - g), 1e-9, "<=", start, measured_gamma=p, gamma=g),
           make_verdict(f"qac0f_branch_overlap{tag}", cond, 1 - 1e-10, ">=", start),
           make_verdict(f"qac0f_tuned_success{tag}", abs(pab - res.tuning.gamma_tilde), 1e-10, "<=", start)]
    out.append(dicke_verdict(res.circuit, n, k, L.Q, name=f"qac0f_fidelity{tag}", require_clean=False,
                             state=run(res.circuit, max_qubits)))
    return out


def suite_qac0f(grid: Sequence[tuple[int, int, int]] = QAC0F_GRID, max_qubits: int | None = None) -> list[Verdict]:
    from .synth.qac0f import synth_dicke_qac0f

    out = []
    cap = default_max_qubits() if max_qubits is None else max_qubits
    for n, k, M in grid:
        out.extend(qac0f_point(n, k, M, cap))
    start = time.perf_counter()
    depths = {n: synth_dicke_qac0f(n, 1, 3).report.depth for n in (3, 4, 5)}
    out.append(make_verdict("qac0f_depth_flat(k=1,M=3)", len(set(depths.values())), 1, "==", start,
                            depths={str(n): d for n, d in depths.items()}))
    return out


def suite_formula() -> list[Verdict]:
    from .synth.qac0f import gamma, gamma_lower_bound, p_good

    start = time.perf_counter()
    nmax = 1000
    lfact = np.array([math.lgamma(i + 1) for i in range(nmax + 1)])
    worst, arg = math.inf, None
    for n in range(2, nmax + 1):
        k = np.arange(1, n)
        # log p_good + k; rounding here is ~1e-12, far below the 1e-9 margin asked for
        margin = lfact[n] - lfact[k] - lfact[n - k] + k * np.log(k / n) + (n - k) * np.log1p(-k / n) + k
        i = int(np.argmin(margin))
        if margin[i] < worst:
            worst, arg = float(margin[i]), (n, int(k[i]))
    spot = max(abs(math.log(p_good(n, k)) + k - float(lfact[n] - lfact[k] - lfact[n - k] + k * math.log(k / n)
                                                        + (n - k) * math.log1p(-k / n) + k))
               for n, k in ((2, 1), (50, 7), (1000, 1), (1000, 500), (999, 998)))
    out = [make_verdict("p_good>=exp(-k)(n<=1000)", worst, 1e-9, ">=", start, log_margin_at=arg,
                        direct_vs_log=spot)]
    start = time.perf_counter()
    worst = min(gamma(n, k, M) - gamma_lower_bound(n, k, M) for n, k, M in QAC0F_GRID)
    out.append(make_verdict("gamma>=1-exp(-M p_good)", worst, 0.0, ">=", start))
    return out


def run_suite(name: str, nmax: int = 8, seed: int | None = None,
              max_qubits: int | None = None) -> list[Verdict]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {SUITES}")
    kw_seed = {} if seed is None else {"seed": seed}
    parts = {
        "boolean": lambda: suite_boolean(nmax),
        "exact": lambda: suite_exact(nmax),
        "grover": suite_grover,
        "approx": lambda: suite_approx(**kw_seed),
        "gadget": lambda: suite_gadget(**kw_seed),
        "qac0f": lambda: suite_qac0f(max_qubits=max_qubits),
        "formula": suite_formula,
    }
    if name == "all":
        return [v for key in SUITES[:-1] for v in parts[key]()]
    return parts[name]()
