"""Crank-Nicolson simulation of quantum tunneling decay through a square barrier.

A particle starts in the ground state of the inner well [0, 1], leaks through
a square barrier on [1, 1+w], and the package tracks the nonescape
probability P(a,t), its log decay rate g(a,t), and the probe current j(a,t),
together with fitting and oracle machinery to validate the three decay
stages (Gaussian start, accelerated transition, exponential tail).
"""

from .analysis import (
    FitResult,
    PhaseSegmentation,
    crossing_time,
    fit_exponential,
    fit_gaussian,
    positive_g_intervals,
    segment_phases,
    transition_peak,
)
from .checks import CheckResult, run_checks
from .csvio import read_manifest, read_trace_csv, write_manifest, write_trace_csv
from .model import (
    AbsorberSpec,
    BarrierSpec,
    DEFAULT_CONFIG,
    GridSpec,
    ScenarioConfig,
    WaveFunction,
    initial_wavefunction,
    load_config,
    parse_config_text,
    sample_potential,
    validate_config,
)
from .observables import (
    DecayTrace,
    log_derivative,
    nonescape_probability,
    probability_current,
)
from .operator import TridiagonalOperator, apply, build_hamiltonian, energy_expectation
from .oracles import (
    ResonancePole,
    free_halfline_evolve,
    free_halfline_nonescape,
    resonance_gamma,
    spectral_evolve_closed_box,
)
from .presets import PRESET_NAMES, expand_preset, scenario_label
from .propagator import NumericalBreakdownError, StepperState, make_stepper, run, step

__all__ = [
    "AbsorberSpec",
    "BarrierSpec",
    "CheckResult",
    "DEFAULT_CONFIG",
    "DecayTrace",
    "FitResult",
    "GridSpec",
    "NumericalBreakdownError",
    "PRESET_NAMES",
    "PhaseSegmentation",
    "ResonancePole",
    "ScenarioConfig",
    "StepperState",
    "TridiagonalOperator",
    "WaveFunction",
    "apply",
    "build_hamiltonian",
    "crossing_time",
    "energy_expectation",
    "expand_preset",
    "fit_exponential",
    "fit_gaussian",
    "free_halfline_evolve",
    "free_halfline_nonescape",
    "initial_wavefunction",
    "load_config",
    "log_derivative",
    "make_stepper",
    "nonescape_probability",
    "parse_config_text",
    "positive_g_intervals",
    "probability_current",
    "read_manifest",
    "read_trace_csv",
    "resonance_gamma",
    "run",
    "run_checks",
    "sample_potential",
    "scenario_label",
    "segment_phases",
    "spectral_evolve_closed_box",
    "step",
    "transition_peak",
    "validate_config",
    "write_manifest",
    "write_trace_csv",
]

__version__ = "0.1.0"
