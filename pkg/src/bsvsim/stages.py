"""Optical-chain transforms: saturable absorber, harmonic yield, taps.

All stages are pure per-pulse (or per-mode) maps on intensity arrays;
only count splitting consumes randomness, through the usual chunked
stream contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import STREAM_SPLIT, map_chunks

HARMONIC_ORDERS = (2, 3, 4)


@dataclass(frozen=True)
class Absorber:
    """Intensity-dependent loss; stronger bursts lose a larger fraction."""
    kappa: float  # per inverse photon

    def __post_init__(self):
        if not (self.kappa >= 0 and np.isfinite(self.kappa)):
            raise ValueError("kappa must be finite and >= 0")


@dataclass(frozen=True)
class Harmonic:
    """n-th harmonic generator with free scale eta_n (calibration, not physics)."""
    order: int
    eta: float = 1.0

    def __post_init__(self):
        if self.order not in HARMONIC_ORDERS:
            raise ValueError(f"harmonic order must be one of {HARMONIC_ORDERS}")
        if not (self.eta > 0 and np.isfinite(self.eta)):
            raise ValueError("eta must be finite and > 0")


@dataclass(frozen=True)
class Attenuator:
    transmission: float

    def __post_init__(self):
        if not (0.0 <= self.transmission <= 1.0):
            raise ValueError("transmission must lie in [0, 1]")


@dataclass(frozen=True)
class Sampler:
    """Beam sampler tapping off a fraction of the power for monitoring."""
    tap_fraction: float

    def __post_init__(self):
        if not (0.0 <= self.tap_fraction <= 1.0):
            raise ValueError("tap_fraction must lie in [0, 1]")


def absorb(w, kappa: float):
    """Saturable loss w -> w / (1 + kappa*w); monotone, bounded by 1/kappa."""
    w = np.asarray(w, dtype=np.float64)
    if np.any(w < 0):
        raise ValueError("intensity must be non-negative")
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    return w / (1.0 + kappa * w)


def harmonic_yield(mode_intensities, order: int, eta: float = 1.0):
    """Harmonic photons per pulse: eta * sum_k w_k**order over temporal modes.

    The response is instantaneous, so modes contribute independently.
    Accepts a (pulses, modes) array or a single pulse's 1-D mode vector.
    """
    if order not in HARMONIC_ORDERS:
        raise ValueError(f"harmonic order must be one of {HARMONIC_ORDERS}")
    w = np.asarray(mode_intensities, dtype=np.float64)
    return eta * (w ** order).sum(axis=-1)


def attenuate(w, transmission: float):
    """Linear loss on intensities; leaves every normalized g(n) unchanged."""
    if not (0.0 <= transmission <= 1.0):
        raise ValueError("transmission must lie in [0, 1]")
    return np.asarray(w, dtype=np.float64) * transmission


def split_counts(counts: np.ndarray, tap_fraction: float, seed: int,
                 stream_id: int = STREAM_SPLIT,
                 threads: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Binomially split integer counts at a beam sampler.

    Returns (tapped, passed) with tapped ~ Binomial(N, tap_fraction) per
    pulse and passed = N - tapped. Preserves normalized factorial moments
    on both outputs.
    """
    if not (0.0 <= tap_fraction <= 1.0):
        raise ValueError("tap_fraction must lie in [0, 1]")
    n = np.asarray(counts)
    if n.ndim != 1 or not np.issubdtype(n.dtype, np.integer):
        raise ValueError("counts must be a 1-D integer array")
    if np.any(n < 0):
        raise ValueError("counts must be non-negative")
    tapped = np.empty(n.shape[0], dtype=np.int64)

    def fill(rng: np.random.Generator, sl: slice):
        tapped[sl] = rng.binomial(n[sl], tap_fraction)

    map_chunks(fill, n.shape[0], seed, stream_id, threads)
    return tapped, n - tapped
