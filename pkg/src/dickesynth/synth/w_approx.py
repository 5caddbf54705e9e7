"""Approximate W states with a constant number of ancillas.

The EXACT_1 oracle is replaced by t repetitions of the randomized gadget
followed by a "more than 3t/8 accepted" threshold.  Gadgets run one after
another on the same three work qubits (w_a, w_b, g), so the ancilla count does
not depend on n.  Two threshold back ends are provided:

* ``counter``: each accepting gadget increments an m-bit counter, m =
  bit_length(t); the final comparison is a XOR of disjoint cubes over the
  counter bits.  Ancillas: 3 + m + 1.
* ``dnf``: gadget outcomes are stored in t bits and the threshold is the
  canonical DNF over all 2^t outcome patterns.  Only for t <= 8.  With
  ``parallel=True`` all gadgets run at once on FanOut copies of the input.

``oracle="exact"`` swaps in a perfect weight oracle, which reduces the
construction to the exact k = 1 amplification.
"""

from __future__ import annotations

import itertools
from typing import NamedTuple, Sequence

from ..boolean import SubsetFamily, choose_t, decision_threshold
from ..circuit import (
    Circuit,
    CircuitBuilder,
    DepthConvention,
    Layer,
    RegisterAllocator,
    ResourceReport,
    compose,
    inverse_layers,
    merge_parallel,
    resource_report,
)
from ..errors import ConfigMismatch, Unsupported
from ..gates import FanOut, Gate, MultiToffoli, WeightOracle, x
from .angles import AngleSolution, dicke_angles
from .dicke_qac0 import phase_oracle, product_reflection, ry_layer
from .threshold import _check_cap

DNF_MAX_T = 8


class WSynthesis(NamedTuple):
    circuit: Circuit
    angles: AngleSolution
    report: ResourceReport


def ge_cubes(threshold: int, m: int) -> list[tuple[tuple[int, bool], ...]]:
    """Disjoint cubes over bits 0..m-1 (LSB first) whose union is {v : v >= threshold}.

    Each cube is a tuple of (bit, value) literals.
    """
    if threshold <= 0:
        return [()]
    if threshold >= 1 << m:
        return []
    cubes = []
    for i in range(m - 1, -1, -1):
        if not (threshold >> i) & 1:
            prefix = tuple((j, bool((threshold >> j) & 1)) for j in range(m - 1, i, -1))
            cubes.append(prefix + ((i, True),))
    cubes.append(tuple((j, bool((threshold >> j) & 1)) for j in range(m - 1, -1, -1)))
    return cubes


def _gadget_layers(xs: Sequence[int], subset: Sequence[int], wa: int, wb: int, g: int) -> list[list[Gate]]:
    """Layers leaving g = gadget(x); w_a, w_b hold the two halves."""
    inside = [xs[j] for j in subset]
    outside = [xs[j] for j in range(len(xs)) if j not in set(subset)]
    first: list[Gate] = []
    if inside:
        first.append(MultiToffoli(tuple((q, False) for q in inside), wa))
        pre = [x(wb)]
    else:
        pre = [x(wa), x(wb)]
    first.append(MultiToffoli(tuple((q, False) for q in outside), wb))
    return [pre, first, [MultiToffoli(((wa, True), (wb, True)), g)]]


def _increment(control: int, counter: Sequence[int]) -> list[list[Gate]]:
    """counter += control, highest bit first so every bit sees the old lower bits."""
    layers = []
    for i in range(len(counter) - 1, -1, -1):
        ctrls = ((control, True),) + tuple((c, True) for c in counter[:i])
        layers.append([MultiToffoli(ctrls, counter[i])])
    return layers


def _cube_gate(cube, bits: Sequence[int], target: int) -> list[list[Gate]]:
    if not cube:
        return [[x(target)]]
    return [[MultiToffoli(tuple((bits[i], v) for i, v in cube), target)]]


def counter_threshold_layers(alloc: RegisterAllocator, xs: Sequence[int], family: SubsetFamily,
                             target: int) -> list[list[Gate]]:
    wa, wb, g = (alloc.fresh("gadget") for _ in range(3))
    m = max(1, family.t.bit_length())
    counter = [alloc.fresh("counter") for _ in range(m)]
    count: list[list[Gate]] = []
    for subset in family.subsets:
        if len(subset) == family.n:
            continue  # the complement is empty, so the gadget never accepts
        gadget = _gadget_layers(xs, subset, wa, wb, g)
        count += gadget + _increment(g, counter) + inverse_layers(gadget)
    compare = [l for cube in ge_cubes(decision_threshold(family.t), m) for l in _cube_gate(cube, counter, target)]
    return count + compare + inverse_layers(count)


def dnf_threshold_layers(alloc: RegisterAllocator, xs: Sequence[int], family: SubsetFamily,
                         target: int, parallel: bool = False) -> list[list[Gate]]:
    t = family.t
    if t > DNF_MAX_T:
        raise Unsupported(f"the DNF threshold enumerates 2^t patterns; t={t} exceeds {DNF_MAX_T}")
    ys = [alloc.fresh("outcomes") for _ in range(t)]
    if parallel:
        copies = [[q] + [alloc.fresh("copies") for _ in range(t - 1)] for q in xs]
        fan = [[FanOut(c[0], tuple(c[1:])) for c in copies if len(c) > 1]]
        blocks = []
        for i, subset in enumerate(family.subsets):
            wa, wb = alloc.fresh("gadget"), alloc.fresh("gadget")
            if len(subset) < family.n:
                blocks.append(_gadget_layers([c[i] for c in copies], subset, wa, wb, ys[i]))
        compute = fan + merge_parallel(blocks)
    else:
        wa, wb = alloc.fresh("gadget"), alloc.fresh("gadget")
        compute = []
        for i, subset in enumerate(family.subsets):
            if len(subset) == family.n:
                continue
            gadget = _gadget_layers(xs, subset, wa, wb, ys[i])
            # keep y_i, release w_a and w_b for the next gadget
            compute += gadget + inverse_layers(gadget[:2])
    need = decision_threshold(t)
    dnf = []
    for pattern in itertools.product((False, True), repeat=t):
        if sum(pattern) >= need:
            dnf.append([MultiToffoli(tuple(zip(ys, pattern)), target)])
    return compute + dnf + inverse_layers(compute)


def w_bit_circuit(n: int, family: SubsetFamily | None, *, oracle: str = "gadget",
                  threshold: str = "counter", parallel: bool = False,
                  convention: DepthConvention | None = None) -> Circuit:
    """Bit circuit for the (approximate) EXACT_1 decision into ``out``."""
    b = CircuitBuilder("qac0", convention)
    xs = b.alloc.register("x", n, "system")
    out = b.alloc.register("out", 1, "output")[0]
    if oracle == "exact":
        b.layer([WeightOracle(xs, out, (1,))])
    elif oracle == "gadget":
        if family is None or family.n != n:
            raise ConfigMismatch("the gadget oracle needs a subset family over n inputs")
        if threshold == "counter":
            if parallel:
                raise Unsupported("the counter threshold is sequential only")
            b.extend(counter_threshold_layers(b.alloc, xs, family, out))
        elif threshold == "dnf":
            b.extend(dnf_threshold_layers(b.alloc, xs, family, out, parallel))
        else:
            raise ValueError(f"unknown threshold back end {threshold!r}")
    else:
        raise ValueError(f"unknown oracle {oracle!r}")
    model = "qac0"
    widths = [len(g.targets) for l in b.layers for g in l if isinstance(g, FanOut)]
    regs = b.alloc.build()
    if widths and max(widths) > b.convention.fanout_width_limit(regs.qubit_count):
        model = "qac0f"
    return b.build(model)


def synth_w_approx(n: int, epsilon: float, family: SubsetFamily | None, *, oracle: str = "gadget",
                   threshold: str = "counter", parallel: bool = False, check_t: bool = True,
                   convention: DepthConvention | None = None,
                   max_qubits: int | None = None) -> WSynthesis:
    """R_y layer, then one round of [approximate EXACT_1 phase oracle, reflection].

    ``family`` must hold choose_t(epsilon / 9) subsets unless ``check_t`` is
    off (used for small-t experiments).
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if n < 2:
        raise ValueError("W states need n >= 2")
    _check_cap(n, max_qubits)
    if oracle == "gadget" and check_t:
        want = choose_t(epsilon / 9)
        if family is None or family.t != want:
            got = None if family is None else family.t
            raise ConfigMismatch(f"family has t={got}, epsilon={epsilon} needs t=choose_t(epsilon/9)={want}")
    angles = dicke_angles(n, 1)
    bit = w_bit_circuit(n, family, oracle=oracle, threshold=threshold, parallel=parallel,
                        convention=convention)
    out = bit.registers.group("out")[0]
    bit = bit.replace(registers=bit.registers.relabeled({out: "ancilla"}))
    system = bit.registers.group("x")
    prep = bit.replace(layers=(ry_layer(system, angles.theta),))
    refl = bit.replace(layers=(Layer((product_reflection(system, angles.theta),)),))
    rounds = [c for _ in range(angles.grover_rounds) for c in (phase_oracle(bit, out), refl)]
    c = compose(prep, *rounds)
    notes = [f"oracle={oracle}", f"grover_rounds={angles.grover_rounds}"]
    if oracle == "gadget":
        notes += [f"threshold={threshold}", f"t={family.t}", f"parallel={parallel}"]
    return WSynthesis(c, angles, resource_report(c, notes))


def eta_for(epsilon: float) -> float:
    """Per-oracle error budget used to size the family."""
    return epsilon / 9


def w_theta(n: int) -> float:
    return dicke_angles(n, 1).theta


__all__ = ["DNF_MAX_T", "WSynthesis", "counter_threshold_layers", "dnf_threshold_layers", "eta_for",
           "ge_cubes", "synth_w_approx", "w_bit_circuit", "w_theta"]
