"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .errors import ConfigMismatch, DickeSynthError, NoSolution, ResourceLimit, Unsupported
from .serialize import circuit_from_json, circuit_to_json, dumps, to_gate_list
from .simulator.statevector import CAP_ENV

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RESOURCE = 0, 1, 2, 3


class ConfigError(Exception):
    pass


def parse_range(text: str) -> list[int]:
    """``"5"`` -> [5]; ``"3..6"`` -> [3, 4, 5, 6]; ``"3,5,8"`` -> [3, 5, 8]."""
    out = []
    for part in text.split(","):
        m = re.fullmatch(r"\s*(\d+)\s*(?:\.\.\s*(\d+)\s*)?", part)
        if not m:
            raise argparse.ArgumentTypeError(f"not an integer or range: {part!r}")
        lo = int(m.group(1))
        hi = int(m.group(2)) if m.group(2) else lo
        if hi < lo:
            raise argparse.ArgumentTypeError(f"empty range {part!r}")
        out.extend(range(lo, hi + 1))
    return out


def _single(values: list[int] | None, flag: str) -> int:
    if not values:
        raise ConfigError(f"{flag} is required")
    if len(values) != 1:
        raise ConfigError(f"{flag} takes a single value for this command")
    return values[0]


def _emit(text: str, out: str | None, name: str | None = None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    if name is not None:
        path.mkdir(parents=True, exist_ok=True)
        path = path / name
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _config(args: argparse.Namespace) -> dict:
    skip = {"func", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# ----------------------------------------------------------------- commands

def _synth_qac0(args) -> tuple[dict, object, object]:
    from .synth.dicke_qac0 import SynthesisConfig, synth_dicke_qac0, synthesis_report

    n, k = _single(args.n, "--n"), _single(args.k, "--k")
    if args.epsilon is not None:
        return _synth_w(args, n, k)
    cfg = SynthesisConfig(n, k, max_qubits=args.max_qubits, use_complement=args.complement)
    res = synth_dicke_qac0(n, k, config=cfg)
    fid = None
    if args.simulate:
        from .verify import dicke_verdict, run

        fid = dicke_verdict(res.circuit, n, k, state=run(res.circuit, args.max_qubits)).measured
    report = synthesis_report(res, n, k, fid)
    report["model"] = res.circuit.model
    report["resources"] = res.report.to_json()
    return report, res.circuit, None


def _synth_w(args, n: int, k: int):
    from .boolean import SubsetFamily, choose_t, derandomize_family
    from .synth.w_approx import synth_w_approx, w_theta

    if k != 1:
        raise ConfigError("approximate mode (--epsilon) prepares W states only; use --k 1")
    eps = args.epsilon
    if args.family:
        family = SubsetFamily.from_json(json.loads(Path(args.family).read_text()))
    else:
        if args.seed is None:
            raise ConfigError("--seed is required to derandomize a subset family")
        family = derandomize_family(n, choose_t(eps / 9), w_theta(n), args.trials, args.seed)
    res = synth_w_approx(n, eps, family, max_qubits=args.max_qubits)
    fid = None
    if args.simulate:
        from .verify import run, w_state

        fid = run(res.circuit, args.max_qubits).product_fidelity(list(res.circuit.registers.group("x")), w_state(n))
    report = {"n": n, "k": 1, "epsilon": eps, "theta": res.angles.theta, "c_target": res.angles.c_target,
              "grover_rounds": res.angles.grover_rounds, "depth": res.report.depth,
              "ancillae": res.report.ancilla_count, "fidelity": fid, "family": family.to_json(),
              "model": res.circuit.model, "resources": res.report.to_json()}
    return report, res.circuit, family


def _synth_qac0f(args) -> tuple[dict, object, object]:
    from .synth.qac0f import BlockLayout, check_layout_cap, choose_M, layout_report, synth_dicke_qac0f

    n, k = _single(args.n, "--n"), _single(args.k, "--k")
    M = args.M if args.M is not None else choose_M(n, k, args.mode, args.gamma_floor)
    check_layout_cap(BlockLayout.build(n, k, M), args.max_qubits)
    res = synth_dicke_qac0f(n, k, M, max_qubits=args.max_qubits, oracle=args.oracle,
                            parallel_select=args.parallel, parallel_extract=args.parallel)
    report = {"n": n, "k": k, "M": M, "depth": res.report.depth, "ancillae": res.report.ancilla_count,
              "grover_rounds": res.tuning.rounds, "gamma": res.tuning.gamma,
              "gamma_tilde": res.tuning.gamma_tilde, "model": "qac0f", "fidelity": None}
    report.update(layout_report(res))
    if args.simulate:
        from .verify import dicke_verdict, run

        report["fidelity"] = dicke_verdict(res.circuit, n, k, res.layout.Q, require_clean=False,
                                           state=run(res.circuit, args.max_qubits)).measured
    return report, res.circuit, None


def cmd_synth(args) -> int:
    if args.model == "qac0":
        report, circuit, _ = _synth_qac0(args)
    else:
        report, circuit, _ = _synth_qac0f(args)
    report["config"] = _config(args)
    if args.out is None:
        _emit(dumps({"report": report, "circuit": circuit_to_json(circuit)}), None)
    else:
        _emit(dumps(circuit_to_json(circuit)), args.out, "circuit.json")
        _emit(dumps(report), args.out, "report.json")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_suite, summary_table

    verdicts = run_suite(args.suite, nmax=args.nmax, seed=args.seed, max_qubits=args.max_qubits)
    lines = [json.dumps({"config": _config(args)}, sort_keys=True)]
    lines += [v.json_line(include_runtime=False) for v in verdicts]
    _emit("\n".join(lines) + "\n", args.out)
    print(summary_table(verdicts), file=sys.stderr)
    failed = [v.name for v in verdicts if not v.passed]
    print(f"{len(verdicts) - len(failed)}/{len(verdicts)} passed", file=sys.stderr)
    return EXIT_OK if not failed else EXIT_FAIL


def cmd_sweep(args) -> int:
    from .verify import dicke_verdict, run

    if not args.n or not args.k:
        raise ConfigError("--n and --k are required")
    rows = []
    if args.model == "qac0":
        from .synth.dicke_qac0 import SynthesisConfig, synth_dicke_qac0

        for k in args.k:
            for n in args.n:
                if n < k:
                    continue
                res = synth_dicke_qac0(n, k, config=SynthesisConfig(n, k, max_qubits=args.max_qubits))
                fid = None
                if args.simulate:
                    fid = dicke_verdict(res.circuit, n, k, state=run(res.circuit, args.max_qubits)).measured
                rows.append({"n": n, "k": k, "depth": res.report.depth, "ancillae": res.report.ancilla_count,
                             "grover_rounds": res.angles.grover_rounds if res.angles else 0, "fidelity": fid})
    else:
        from .synth.qac0f import choose_M, gamma, synth_dicke_qac0f

        for k in args.k:
            for n in args.n:
                if n < k:
                    continue
                M = args.M if args.M is not None else choose_M(n, k, args.mode, args.gamma_floor)
                res = synth_dicke_qac0f(n, k, M, max_qubits=args.max_qubits)
                row = {"n": n, "k": k, "M": M, "gamma": gamma(n, k, M), "depth": res.report.depth,
                       "ancillae": res.report.ancilla_count, "grover_rounds": res.tuning.rounds,
                       "measured_gamma": None, "fidelity": None}
                if args.simulate:
                    L = res.layout
                    row["measured_gamma"] = run(res.preparation, args.max_qubits).probability({L.a0: 1})
                    row["gamma_error"] = abs(row["measured_gamma"] - row["gamma"])
                    row["fidelity"] = dicke_verdict(res.circuit, n, k, L.Q, require_clean=False,
                                                    state=run(res.circuit, args.max_qubits)).measured
                rows.append(row)
    flat = {}
    for row in rows:
        key = (row["k"], row.get("M"), row["grover_rounds"])
        flat.setdefault(key, set()).add(row["depth"])
    flatness = [{"k": k, "M": M, "grover_rounds": l, "depths": sorted(d), "flat": len(d) == 1}
                for (k, M, l), d in sorted(flat.items(), key=lambda kv: str(kv[0]))]
    _emit(dumps({"config": _config(args), "rows": rows, "depth_flatness": flatness}), args.out)
    return EXIT_OK if all(f["flat"] for f in flatness) else EXIT_FAIL


def cmd_derandomize(args) -> int:
    from .boolean import choose_t, derandomize_family
    from .synth.w_approx import w_theta

    if args.seed is None:
        raise ConfigError("--seed is required for derandomize")
    n = _single(args.n, "--n")
    if args.epsilon is None:
        raise ConfigError("--epsilon is required")
    t = args.t if args.t is not None else choose_t(args.epsilon / 9)
    fam = derandomize_family(n, t, w_theta(n), args.trials, args.seed)
    data = fam.to_json()
    data["epsilon"] = args.epsilon
    data["trials"] = args.trials
    _emit(dumps(data), args.out)
    return EXIT_OK


def cmd_export(args) -> int:
    data = json.loads(Path(args.input).read_text())
    if "circuit" in data and "layers" not in data:
        data = data["circuit"]
    _emit(to_gate_list(circuit_from_json(data)), args.out)
    return EXIT_OK


# ----------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dickesynth", description="Constant-depth Dicke state synthesis.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, grid: bool = False):
        sp.add_argument("--n", type=parse_range, help="qubit count or range like 3..6")
        sp.add_argument("--k", type=parse_range, help="weight or range")
        sp.add_argument("--max-qubits", type=int, default=None,
                        help=f"cap on qubits held in superposition (default ${CAP_ENV} or 24)")
        sp.add_argument("--out", default=None, help="output file (or directory for synth)")

    def model_flags(sp):
        sp.add_argument("--model", choices=("qac0", "qac0f"), default="qac0")
        sp.add_argument("--M", type=int, default=None, help="block count for qac0f")
        sp.add_argument("--mode", choices=("paper", "desk"), default="paper", help="how M is chosen")
        sp.add_argument("--gamma-floor", type=float, default=0.5)
        sp.add_argument("--no-simulate", dest="simulate", action="store_false")

    s = sub.add_parser("synth", help="synthesize a circuit and its report")
    common(s)
    model_flags(s)
    s.add_argument("--epsilon", type=float, default=None, help="approximate W mode (qac0, k=1)")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--trials", type=int, default=200)
    s.add_argument("--family", default=None, help="subset family JSON from derandomize")
    s.add_argument("--complement", action="store_true", help="prepare n-k and flip when k > n/2")
    s.add_argument("--oracle", choices=("weight", "explicit"), default="weight")
    s.add_argument("--parallel", action="store_true", help="FanOut-parallel selection and extraction")
    s.set_defaults(func=cmd_synth)

    v = sub.add_parser("verify", help="run a verdict suite")
    v.add_argument("--suite", default="all")
    v.add_argument("--nmax", type=int, default=8)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--max-qubits", type=int, default=None)
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("sweep", help="depth/ancilla/fidelity table over a grid")
    common(w)
    model_flags(w)
    w.set_defaults(func=cmd_sweep)

    d = sub.add_parser("derandomize", help="pick a low-error subset family")
    common(d)
    d.add_argument("--epsilon", type=float, default=None)
    d.add_argument("--t", type=int, default=None, help="override choose_t(epsilon/9)")
    d.add_argument("--trials", type=int, default=200)
    d.add_argument("--seed", type=int, default=None)
    d.set_defaults(func=cmd_derandomize)

    e = sub.add_parser("export", help="circuit JSON to the flat gate list")
    e.add_argument("--in", dest="input", required=True)
    e.add_argument("--out", default=None)
    e.set_defaults(func=cmd_export)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        if exc.estimate:
            print(json.dumps(exc.estimate, sort_keys=True), file=sys.stderr)
        return EXIT_RESOURCE
    except (ConfigError, ConfigMismatch, Unsupported, NoSolution, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DickeSynthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
