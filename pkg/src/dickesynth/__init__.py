"""Constant-depth Dicke state synthesis over global-gate models."""

__version__ = "0.1.0"

from .circuit import Circuit, DepthConvention, Layer, RegisterMap, ResourceReport, compose, depth, inverse
from .errors import (
    ConfigMismatch,
    DickeSynthError,
    NoSolution,
    ResourceLimit,
    Unsupported,
)
from .synth import (
    choose_M,
    dicke_angles,
    gamma,
    grover_rounds,
    p_good,
    synth_dicke_qac0,
    synth_dicke_qac0f,
    synth_exact_circuit,
    synth_threshold_circuit,
    synth_w_approx,
)
from .verify import dicke_state, run_suite, w_state

__all__ = [
    "Circuit", "ConfigMismatch", "DepthConvention", "DickeSynthError", "Layer", "NoSolution", "RegisterMap",
    "ResourceLimit", "ResourceReport", "Unsupported", "__version__", "choose_M", "compose", "depth",
    "dicke_angles", "dicke_state", "gamma", "grover_rounds", "inverse", "p_good", "run_suite",
    "synth_dicke_qac0", "synth_dicke_qac0f", "synth_exact_circuit", "synth_threshold_circuit",
    "synth_w_approx", "w_state",
]
