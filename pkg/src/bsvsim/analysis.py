"""Estimators for correlation functions, power-law fits, and statistical
efficiencies, each bundled with a bootstrap standard error.

Every estimator here is a function of per-pulse column sums, so the
bootstrap resamples pulses jointly across columns. Above a size
threshold, resampling switches to pre-aggregated block sums, which gives
the same variance estimate for iid pulses at a fraction of the cost.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Real
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .rng import STREAM_BOOTSTRAP

DEFAULT_RESAMPLES = 200
_INDEX_BOOTSTRAP_MAX = 20_000
_BLOCKS = 1024


class StatisticsError(ValueError):
    """Estimator preconditions violated (degenerate or empty data)."""


@dataclass(frozen=True)
class EstimateWithError:
    value: float
    std_error: float
    samples: int
    estimator_id: str

    def __post_init__(self):
        if not np.isfinite(self.std_error) or self.std_error < 0:
            raise ValueError("std_error must be finite and >= 0")
        if self.std_error > 0 and self.samples < 2:
            raise ValueError("nonzero std_error requires samples >= 2")

    def __str__(self):
        return f"{self.estimator_id}: {self.value:.6g} +/- {self.std_error:.3g}"


@dataclass(frozen=True)
class PowerLawFit:
    order: int
    coefficient: EstimateWithError
    exponent: Optional[EstimateWithError]
    residual_norm: float
    dropped_points: int


def _bootstrap(columns: Sequence[np.ndarray],
               stat: Callable[[np.ndarray, int], float],
               n_boot: int, seed: int) -> tuple[float, float]:
    """Value and bootstrap s.e. of a statistic of per-pulse column sums."""
    cols = np.column_stack([np.asarray(c, dtype=np.float64) for c in columns])
    m = cols.shape[0]
    value = stat(cols.sum(axis=0), m)
    if n_boot < 2:
        return value, 0.0
    rng = np.random.Generator(np.random.Philox(
        np.random.SeedSequence(entropy=int(seed), spawn_key=(STREAM_BOOTSTRAP,))))

    if m <= _INDEX_BOOTSTRAP_MAX:
        units = cols
    else:
        bounds = np.linspace(0, m, _BLOCKS + 1).astype(np.int64)
        units = np.add.reduceat(cols, bounds[:-1], axis=0)
    n_units = units.shape[0]

    stats = np.empty(n_boot)
    with np.errstate(divide="ignore", invalid="ignore"):
        for b in range(n_boot):
            idx = rng.integers(0, n_units, n_units)
            stats[b] = stat(units[idx].sum(axis=0), m)
    stats = stats[np.isfinite(stats)]
    if stats.size < 2:
        return value, 0.0
    return value, float(np.std(stats, ddof=1))


def estimate_gn(areas, n: int, n_boot: int = DEFAULT_RESAMPLES,
                seed: int = 0) -> EstimateWithError:
    """g(n) from analog pulse areas: M**(n-1) * sum(S**n) / (sum S)**n.

    Scale-invariant, so detector gain drops out. Negative areas from
    electronic noise are allowed as long as they are a minority.
    """
    s = np.asarray(areas, dtype=np.float64)
    if n < 1:
        raise StatisticsError("order must be >= 1")
    m = s.shape[0]
    if m < 2:
        raise StatisticsError("need at least 2 pulses")
    if np.all(s == 0):
        raise StatisticsError("all-zero areas")
    if np.count_nonzero(s < 0) * 2 > m:
        raise StatisticsError("majority of areas negative; signal lost in noise")

    def stat(sums, mm):
        return mm ** (n - 1) * sums[0] / sums[1] ** n

    value, err = _bootstrap([s ** n, s], stat, n_boot, seed)
    return EstimateWithError(value, err, m, f"g{n}_areas")


def estimate_factorial_gn(counts, n: int, n_boot: int = DEFAULT_RESAMPLES,
                          seed: int = 0) -> EstimateWithError:
    """g(n) from photon counts via the n-th factorial moment:
    mean[N (N-1) ... (N-n+1)] / mean[N]**n.
    """
    nn = np.asarray(counts, dtype=np.float64)
    if n < 1:
        raise StatisticsError("order must be >= 1")
    m = nn.shape[0]
    if m < 2:
        raise StatisticsError("need at least 2 pulses")
    if nn.mean() == 0:
        raise StatisticsError("zero mean count")
    ff = np.ones_like(nn)
    for k in range(n):
        ff = ff * (nn - k)

    def stat(sums, mm):
        return mm ** (n - 1) * sums[0] / sums[1] ** n

    value, err = _bootstrap([ff, nn], stat, n_boot, seed)
    return EstimateWithError(value, err, m, f"g{n}_counts")


def hbt_g2(n1, n2, nc, n_boot: int = DEFAULT_RESAMPLES,
           seed: int = 0) -> EstimateWithError:
    """Coincidence estimator M * sum(Nc) / (sum(N1) * sum(N2))."""
    a1 = np.asarray(n1, dtype=np.float64)
    a2 = np.asarray(n2, dtype=np.float64)
    ac = np.asarray(nc, dtype=np.float64)
    if not (a1.shape == a2.shape == ac.shape):
        raise StatisticsError("click arrays must have equal length")
    m = a1.shape[0]
    if a1.sum() == 0 or a2.sum() == 0:
        raise StatisticsError("no singles in one HBT arm")

    def stat(sums, mm):
        return mm * sums[0] / (sums[1] * sums[2])

    value, err = _bootstrap([ac, a1, a2], stat, n_boot, seed)
    return EstimateWithError(value, err, m, "g2_hbt")


def statistical_efficiency(harmonic_energies, pump_intensities, n: int,
                           n_boot: int = DEFAULT_RESAMPLES,
                           seed: int = 0) -> EstimateWithError:
    """Process rate over flux**n: mean(E) / mean(F)**n at one operating point.

    Carries the units of the harmonic scale eta_n; dividing by eta_n gives
    the pump's g(n) in this model.
    """
    e = np.asarray(harmonic_energies, dtype=np.float64)
    f = np.asarray(pump_intensities, dtype=np.float64)
    if e.shape != f.shape:
        raise StatisticsError("energy and flux arrays must have equal length")
    if f.mean() == 0:
        raise StatisticsError("zero mean pump flux")

    def stat(sums, mm):
        return mm ** (n - 1) * sums[0] / sums[1] ** n

    value, err = _bootstrap([e, f], stat, n_boot, seed)
    return EstimateWithError(value, err, e.shape[0], f"xi{n}")


def fit_power_law(flux, rate, n: int, fix_exponent: bool = True) -> PowerLawFit:
    """Least-squares power-law fit R = A * F**n in log-log space.

    Zero-rate points cannot be log-transformed; they are dropped and
    counted in the result. With fix_exponent=False, the exponent is fit
    as well, as a power-law sanity check.
    """
    f = np.asarray(flux, dtype=np.float64)
    r = np.asarray(rate, dtype=np.float64)
    if f.shape != r.shape:
        raise StatisticsError("flux and rate must have equal length")
    if np.any(f <= 0):
        raise StatisticsError("flux values must be positive")
    if np.any(r < 0):
        raise StatisticsError("rates must be non-negative")
    keep = r > 0
    dropped = int((~keep).sum())
    f, r = f[keep], r[keep]
    m = f.shape[0]
    if m < 3:
        raise StatisticsError("need at least 3 usable points")
    lf, lr = np.log(f), np.log(r)

    if fix_exponent:
        resid = lr - n * lf
        log_a = resid.mean()
        se_log_a = resid.std(ddof=1) / np.sqrt(m)
        a = float(np.exp(log_a))
        coeff = EstimateWithError(a, a * float(se_log_a), m, f"A{n}")
        rnorm = float(np.sqrt(np.sum((resid - log_a) ** 2)))
        return PowerLawFit(n, coeff, None, rnorm, dropped)

    x = np.column_stack([lf, np.ones(m)])
    beta, _, _, _ = np.linalg.lstsq(x, lr, rcond=None)
    p, log_a = beta
    resid = lr - x @ beta
    dof = m - 2
    sigma2 = float(resid @ resid) / dof if dof > 0 else 0.0
    cov = sigma2 * np.linalg.inv(x.T @ x)
    a = float(np.exp(log_a))
    coeff = EstimateWithError(a, a * float(np.sqrt(cov[1, 1])), m, f"A{n}")
    expo = EstimateWithError(float(p), float(np.sqrt(cov[0, 0])), m, f"p{n}")
    return PowerLawFit(n, coeff, expo, float(np.sqrt(resid @ resid)), dropped)


def predict_harmonic_g2(pump_gs: Mapping[int, Real], n: int):
    """Second-order correlation of the n-th harmonic from pump moments:
    g2(harmonic n) = g(2n) / g(n)**2. Exact for rational inputs.
    """
    if n not in pump_gs or 2 * n not in pump_gs:
        raise KeyError(f"need pump g({n}) and g({2 * n})")
    from fractions import Fraction
    high, low = pump_gs[2 * n], pump_gs[n]
    if isinstance(high, int) and isinstance(low, int):
        high = Fraction(high)
    return high / low ** 2
