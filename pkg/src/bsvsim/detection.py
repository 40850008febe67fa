"""Detector models: charge-integrating analog readout, gated click pairs
in a Hanbury Brown-Twiss arrangement, and photon-number post-selection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .rng import STREAM_CHARGE, STREAM_HBT, map_chunks


class EmptySelectionError(ValueError):
    """Post-selection window rejected every pulse."""


@dataclass(frozen=True)
class ChargeDetectorSpec:
    """Charge-integrating detector producing a pulse area S = gain * N.

    gain is in pV*s per photon; noise_photons is the rms electronic noise
    in photon equivalents; saturation (photons) flags overflowed pulses.
    deterministic=True disables shot and electronic noise, returning
    exactly gain * W (unit-test mode).
    """

    gain: float = 5.0
    quantum_efficiency: float = 0.85
    noise_photons: float = 1600.0
    saturation: Optional[float] = None
    deterministic: bool = False

    def __post_init__(self):
        if not (self.gain > 0 and np.isfinite(self.gain)):
            raise ValueError("gain must be finite and > 0")
        if not (0.0 <= self.quantum_efficiency <= 1.0):
            raise ValueError("quantum_efficiency must lie in [0, 1]")
        if self.noise_photons < 0:
            raise ValueError("noise_photons must be >= 0")


@dataclass(frozen=True)
class ClickPairSpec:
    """Pair of gated single-photon counters behind a beam splitter."""

    efficiency: float = 1.0
    splitting_ratio: float = 0.5
    dark_count_prob: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.efficiency <= 1.0):
            raise ValueError("efficiency must lie in [0, 1]")
        if not (0.0 <= self.splitting_ratio <= 1.0):
            raise ValueError("splitting_ratio must lie in [0, 1]")
        if not (0.0 <= self.dark_count_prob <= 1.0):
            raise ValueError("dark_count_prob must lie in [0, 1]")


def charge_detect(intensity: np.ndarray, spec: ChargeDetectorSpec, seed: int,
                  stream_id: int = STREAM_CHARGE,
                  threads: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Pulse areas (pV*s) for per-pulse intensities, plus a saturation mask.

    S = gain * Poisson(eta * W) + Normal(0, (gain * noise_photons)**2).
    Saturated pulses (detected count above spec.saturation) are flagged
    True in the mask and must be excluded from estimators by the caller.
    """
    w = np.asarray(intensity, dtype=np.float64)
    if np.any(w < 0):
        raise ValueError("intensity must be non-negative")
    if spec.deterministic:
        areas = spec.gain * w
        return areas, np.zeros(w.shape[0], dtype=bool)

    areas = np.empty(w.shape[0], dtype=np.float64)
    flagged = np.zeros(w.shape[0], dtype=bool)

    def fill(rng: np.random.Generator, sl: slice):
        counts = rng.poisson(spec.quantum_efficiency * w[sl])
        noise = rng.standard_normal(sl.stop - sl.start)
        areas[sl] = spec.gain * counts + spec.gain * spec.noise_photons * noise
        if spec.saturation is not None:
            flagged[sl] = counts > spec.saturation

    map_chunks(fill, w.shape[0], seed, stream_id, threads)
    return areas, flagged


def hbt_detect(harmonic_photons: np.ndarray, spec: ClickPairSpec, seed: int,
               stream_id: int = STREAM_HBT,
               threads: int = 1) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-pulse click patterns (N1, N2, coincidence) of the HBT pair.

    Each arm clicks with probability 1 - exp(-eta_c * E * share); arms are
    conditionally independent given the pulse energy.
    """
    e = np.asarray(harmonic_photons, dtype=np.float64)
    if np.any(e < 0):
        raise ValueError("harmonic photon numbers must be non-negative")
    n1 = np.empty(e.shape[0], dtype=np.int8)
    n2 = np.empty(e.shape[0], dtype=np.int8)

    p1 = -np.expm1(-spec.efficiency * e * spec.splitting_ratio)
    p2 = -np.expm1(-spec.efficiency * e * (1.0 - spec.splitting_ratio))
    if spec.dark_count_prob > 0:
        p1 = 1.0 - (1.0 - p1) * (1.0 - spec.dark_count_prob)
        p2 = 1.0 - (1.0 - p2) * (1.0 - spec.dark_count_prob)

    def fill(rng: np.random.Generator, sl: slice):
        u = rng.random((sl.stop - sl.start, 2))
        n1[sl] = u[:, 0] < p1[sl]
        n2[sl] = u[:, 1] < p2[sl]

    map_chunks(fill, e.shape[0], seed, stream_id, threads)
    return n1, n2, (n1 & n2)


def post_select(tapped: np.ndarray, lo: float, hi: float) -> tuple[np.ndarray, float]:
    """Selection mask for pulses whose tapped monitor value lies in [lo, hi].

    Returns (mask, selection_fraction). Raises EmptySelectionError rather
    than letting downstream statistics silently divide by zero.
    """
    if lo > hi:
        raise ValueError("window must satisfy lo <= hi")
    tapped = np.asarray(tapped)
    mask = (tapped >= lo) & (tapped <= hi)
    kept = int(mask.sum())
    if kept == 0:
        raise EmptySelectionError(f"window [{lo}, {hi}] selects no pulses")
    return mask, kept / tapped.shape[0]


def tune_window(tapped: np.ndarray, min_survivors: int = 1000,
                half_width: Optional[float] = None,
                grow: float = 1.25) -> tuple[float, float]:
    """Default post-selection window: centered on the tapped median and
    widened geometrically until at least ``min_survivors`` pulses remain.
    """
    tapped = np.asarray(tapped, dtype=np.float64)
    if min_survivors > tapped.shape[0]:
        raise ValueError("min_survivors exceeds the number of pulses")
    center = float(np.median(tapped))
    scale = float(np.std(tapped)) or max(abs(center), 1.0)
    h = half_width if half_width is not None else scale * 1e-3
    while True:
        mask = (tapped >= center - h) & (tapped <= center + h)
        if int(mask.sum()) >= min_survivors:
            return center - h, center + h
        h *= grow
