"""Circuit synthesizers."""

from .angles import AngleSolution, binomial_overlap, dicke_angles, grover_rounds, solve_theta
from .dicke_qac0 import SynthesisConfig, phase_oracle, synth_dicke_qac0
from .qac0f import (
    AmplitudeTuning,
    BlockLayout,
    choose_M,
    gamma,
    p_good,
    synth_block_init,
    synth_cswap_extract,
    synth_dicke_qac0f,
    synth_good_flag,
    synth_lsb_onehot,
    tune_amplitude,
)
from .threshold import synth_exact_circuit, synth_threshold_circuit
from .w_approx import synth_w_approx

__all__ = [
    "AmplitudeTuning", "AngleSolution", "BlockLayout", "SynthesisConfig", "binomial_overlap", "choose_M",
    "dicke_angles", "gamma", "grover_rounds", "p_good", "phase_oracle", "solve_theta", "synth_block_init",
    "synth_cswap_extract", "synth_dicke_qac0", "synth_dicke_qac0f", "synth_exact_circuit", "synth_good_flag",
    "synth_lsb_onehot", "synth_threshold_circuit", "synth_w_approx", "tune_amplitude",
]
