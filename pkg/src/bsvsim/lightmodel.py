"""Light-source statistics: analytic correlation functions and sampling.

The source is modeled at the classical-intensity level. Each temporal
mode carries an intensity w = x**2 + y**2 with independent zero-mean
Gaussian quadratures x ~ N(0, a), y ~ N(0, b). The variance ratio
r = b/a interpolates between the two limits of interest:

    r = 0   degenerate squeezed vacuum,  g(n) = (2n-1)!!
    r = 1   thermal statistics,          g(n) = n!

Coherent light is the zero-fluctuation special case. Normalized moments
are computed exactly with rational arithmetic up to order 10.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import comb
from typing import Optional

import numpy as np

from .rng import STREAM_POISSONIZE, map_chunks

MAX_ANALYTIC_ORDER = 10


class Kind(Enum):
    COHERENT = "coherent"
    GAUSSIAN_QUADRATURE = "gaussian_quadrature"


@dataclass(frozen=True)
class LightModel:
    """Per-pulse photon statistics of the pump.

    mean_photons is the ensemble-average total photon number per pulse,
    shared equally between ``temporal_modes`` independent modes.
    quad_ratio is the minor/major quadrature variance ratio r in [0, 1];
    it is ignored for the coherent kind.
    """

    kind: Kind
    mean_photons: float
    quad_ratio: float = 0.0
    temporal_modes: int = 1

    def __post_init__(self):
        if self.mean_photons < 0:
            raise ValueError("mean_photons must be >= 0")
        if not (0.0 <= self.quad_ratio <= 1.0):
            raise ValueError("quad_ratio must lie in [0, 1]")
        if self.temporal_modes < 1:
            raise ValueError("temporal_modes must be >= 1")


def coherent(mean_photons: float, temporal_modes: int = 1) -> LightModel:
    return LightModel(Kind.COHERENT, mean_photons, 0.0, temporal_modes)


def bsv(mean_photons: float, quad_ratio: float = 0.0,
        temporal_modes: int = 1) -> LightModel:
    """Squeezed-vacuum family; quad_ratio=0 is the superbunched limit."""
    return LightModel(Kind.GAUSSIAN_QUADRATURE, mean_photons, quad_ratio,
                      temporal_modes)


def thermal(mean_photons: float, temporal_modes: int = 1) -> LightModel:
    return LightModel(Kind.GAUSSIAN_QUADRATURE, mean_photons, 1.0,
                      temporal_modes)


@dataclass
class PulseEnsemble:
    """Columnar store of per-pulse data; the pipeline's universal currency.

    mode_intensities has shape (pulses, temporal_modes), photons per mode.
    Downstream stages attach tag arrays (harmonic energy, detected areas,
    click patterns) without copying the intensities.
    """

    mode_intensities: np.ndarray
    seed: int
    stream_id: int = 0
    tags: dict = field(default_factory=dict)

    def __post_init__(self):
        self.mode_intensities = np.asarray(self.mode_intensities, dtype=np.float64)
        if self.mode_intensities.ndim != 2:
            raise ValueError("mode_intensities must be 2-D (pulses, modes)")
        if not np.all(np.isfinite(self.mode_intensities)):
            raise ValueError("intensities must be finite")
        if np.any(self.mode_intensities < 0):
            raise ValueError("intensities must be non-negative")

    def __len__(self) -> int:
        return self.mode_intensities.shape[0]

    @property
    def total_intensity(self) -> np.ndarray:
        """Per-pulse total photon number (sum over temporal modes)."""
        return self.mode_intensities.sum(axis=1)


def _odd_double_factorial(k: int) -> int:
    """(2k-1)!! with the k=0 convention (−1)!! = 1."""
    out = 1
    for j in range(1, k + 1):
        out *= 2 * j - 1
    return out


def _single_mode_moments(model: LightModel, nmax: int) -> list[Fraction]:
    """Raw moments E[w**n], n=0..nmax, of one unit-mean temporal mode.

    For w = x**2 + y**2 with Var x = a, Var y = b and a + b = 1:
        E[w**n] = sum_k C(n,k) (2k-1)!! (2(n-k)-1)!! a**k b**(n-k)
    using E[x**(2k)] = (2k-1)!! a**k for a centered Gaussian.
    """
    if model.kind is Kind.COHERENT:
        return [Fraction(1)] * (nmax + 1)
    r = Fraction(model.quad_ratio)
    a = 1 / (1 + r)
    b = r / (1 + r)
    moments = []
    for n in range(nmax + 1):
        m = Fraction(0)
        for k in range(n + 1):
            m += (comb(n, k) * _odd_double_factorial(k)
                  * _odd_double_factorial(n - k) * a**k * b**(n - k))
        moments.append(m)
    return moments


def _convolve_moments(m1: list[Fraction], m2: list[Fraction]) -> list[Fraction]:
    """Raw moments of X + Y for independent X, Y given their raw moments."""
    nmax = len(m1) - 1
    return [sum(comb(n, k) * m1[k] * m2[n - k] for k in range(n + 1))
            for n in range(nmax + 1)]


def _iid_sum_moments(m: list[Fraction], count: int) -> list[Fraction]:
    """Raw moments of the sum of ``count`` iid variables, by squaring."""
    result = [Fraction(1)] + [Fraction(0)] * (len(m) - 1)
    result[0] = Fraction(1)
    base = m
    k = count
    acc: Optional[list[Fraction]] = None
    while k:
        if k & 1:
            acc = base if acc is None else _convolve_moments(acc, base)
        k >>= 1
        if k:
            base = _convolve_moments(base, base)
    assert acc is not None
    return acc


def analytic_gn(model: LightModel, n: int) -> Fraction:
    """Exact normalized n-th intensity moment g(n) of the pulse total.

    Raises ValueError outside the supported order range 1..10.
    """
    if not (1 <= n <= MAX_ANALYTIC_ORDER):
        raise ValueError(f"order must be in 1..{MAX_ANALYTIC_ORDER}, got {n}")
    m = _single_mode_moments(model, n)
    mt = model.temporal_modes
    if mt > 1:
        m = _iid_sum_moments(m, mt)
    # unit single-mode mean -> E[total] = mt
    return m[n] / Fraction(mt) ** n


def sample_ensemble(model: LightModel, pulse_count: int, seed: int,
                    stream_id: int = 0, threads: int = 1) -> PulseEnsemble:
    """Draw per-pulse, per-mode intensities; deterministic in (seed, stream_id)."""
    if pulse_count < 1:
        raise ValueError("pulse_count must be >= 1")
    mt = model.temporal_modes
    per_mode = model.mean_photons / mt
    out = np.empty((pulse_count, mt), dtype=np.float64)

    if model.kind is Kind.COHERENT:
        out.fill(per_mode)
        return PulseEnsemble(out, seed=seed, stream_id=stream_id)

    r = model.quad_ratio
    a = per_mode / (1.0 + r)
    b = per_mode * r / (1.0 + r)

    def fill(rng: np.random.Generator, sl: slice):
        xy = rng.standard_normal((sl.stop - sl.start, mt, 2))
        out[sl] = a * xy[:, :, 0] ** 2 + b * xy[:, :, 1] ** 2

    map_chunks(fill, pulse_count, seed, stream_id, threads)
    return PulseEnsemble(out, seed=seed, stream_id=stream_id)


def poissonize(intensity: np.ndarray, efficiency: float, seed: int,
               stream_id: int = STREAM_POISSONIZE,
               threads: int = 1) -> np.ndarray:
    """Detected photon counts N ~ Poisson(efficiency * W), per pulse.

    Factorial moments of the counts equal ordinary moments of the scaled
    intensity, so normalized factorial moments reproduce analytic_gn.
    """
    if not (0.0 <= efficiency <= 1.0):
        raise ValueError("efficiency must lie in [0, 1]")
    w = np.asarray(intensity, dtype=np.float64)
    if w.ndim != 1:
        raise ValueError("intensity must be a 1-D per-pulse array")
    counts = np.empty(w.shape[0], dtype=np.int64)

    def fill(rng: np.random.Generator, sl: slice):
        counts[sl] = rng.poisson(efficiency * w[sl])

    map_chunks(fill, w.shape[0], seed, stream_id, threads)
    return counts
