"""Monte-Carlo toolkit for harmonic generation from noisy light.

Simulates per-pulse photon statistics of coherent, thermal, and
squeezed-vacuum pumps, pushes them through an optical chain (saturable
absorber, harmonic generator, beam taps), models analog and click
detection, and estimates correlation functions with bootstrap errors.
"""

from .lightmodel import (
    Kind,
    LightModel,
    PulseEnsemble,
    analytic_gn,
    bsv,
    coherent,
    poissonize,
    sample_ensemble,
    thermal,
)
from .stages import (
    Absorber,
    Attenuator,
    Harmonic,
    Sampler,
    absorb,
    attenuate,
    harmonic_yield,
    split_counts,
)
from .detection import (
    ChargeDetectorSpec,
    ClickPairSpec,
    EmptySelectionError,
    charge_detect,
    hbt_detect,
    post_select,
    tune_window,
)
from .analysis import (
    EstimateWithError,
    PowerLawFit,
    StatisticsError,
    estimate_factorial_gn,
    estimate_gn,
    fit_power_law,
    hbt_g2,
    predict_harmonic_g2,
    statistical_efficiency,
)

__version__ = "0.1.0"

__all__ = [
    "Kind", "LightModel", "PulseEnsemble", "analytic_gn", "bsv", "coherent",
    "poissonize", "sample_ensemble", "thermal",
    "Absorber", "Attenuator", "Harmonic", "Sampler", "absorb", "attenuate",
    "harmonic_yield", "split_counts",
    "ChargeDetectorSpec", "ClickPairSpec", "EmptySelectionError",
    "charge_detect", "hbt_detect", "post_select", "tune_window",
    "EstimateWithError", "PowerLawFit", "StatisticsError",
    "estimate_factorial_gn", "estimate_gn", "fit_power_law", "hbt_g2",
    "predict_harmonic_g2", "statistical_efficiency",
]
