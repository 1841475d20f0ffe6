"""Interharmonic-aware active power from a linearized DFT spectrum."""

from .errors import (
    DenseInterharmonicError,
    IllConditionedSystemError,
    LinDFTError,
    PoleProximityError,
    SignalSpecError,
    StencilError,
)
from .linear_estimator import (
    CandidateComponent,
    EstimationResult,
    EstimatorConfig,
    RecoveredComponent,
    compute_mu,
    estimate,
    estimate_components,
)
from .power_bands import (
    BandPartition,
    PowerReport,
    band_powers,
    classify,
    ground_truth_power,
    match_components,
    pair_power,
    power_report,
)
from .reference_estimators import BaselineConfig, fft_estimate, wifft_estimate
from .signal_model import FrequencyComponent, SampledSignal, SignalSpec, add_awgn, synthesize
from .spectrum_core import PeakCluster, Spectrum, dft, find_peaks

__version__ = "0.1.0"

__all__ = [
    "BandPartition", "BaselineConfig", "CandidateComponent", "DenseInterharmonicError", "EstimationResult",
    "EstimatorConfig", "FrequencyComponent", "IllConditionedSystemError", "LinDFTError", "PeakCluster",
    "PoleProximityError", "PowerReport", "RecoveredComponent", "SampledSignal", "SignalSpec", "SignalSpecError",
    "Spectrum", "StencilError", "add_awgn", "band_powers", "classify", "compute_mu", "dft", "estimate",
    "estimate_components", "fft_estimate", "find_peaks", "ground_truth_power", "match_components", "pair_power",
    "power_report", "synthesize", "wifft_estimate",
]
