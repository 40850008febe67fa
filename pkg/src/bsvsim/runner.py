"""Scenario execution: source -> stage chain -> detectors -> estimators.

Every grid point of a sweep reuses the same seed (common random numbers),
so monotone parameter changes give monotone statistic responses without
Monte-Carlo crossing noise. All outputs are deterministic for a fixed
(config, seed), independent of the thread count.
"""

from __future__ import annotations

import dataclasses
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import analysis, detection, lightmodel, stages
from .analysis import EstimateWithError, StatisticsError
from .config import (AnalysisRequest, ConfigError, ScenarioConfig,
                     quad_ratio_from_wavelength)
from .lightmodel import Kind, LightModel
from .rng import (STREAM_CHARGE, STREAM_HBT, STREAM_POISSONIZE, STREAM_SOURCE)

OUTPUT_DIR_ENV = "BSVSIM_OUT"
PULSE_FILE_CHUNK = 1_000_000


class RunError(RuntimeError):
    """Runtime/statistics failure, tagged with the scenario id."""

    def __init__(self, scenario_id: str, message: str):
        super().__init__(f"[{scenario_id}] {message}")
        self.scenario_id = scenario_id


@dataclass
class PointResult:
    """Everything measured at one sweep grid point."""
    grid_index: int
    parameter: str
    param_value: float
    estimates: dict[str, EstimateWithError] = field(default_factory=dict)
    # per-pulse arrays kept for pulse-record output and tests
    pump_total: Optional[np.ndarray] = None
    monitor_area: Optional[np.ndarray] = None
    harmonic_energy: Optional[np.ndarray] = None
    clicks: Optional[tuple[np.ndarray, np.ndarray, np.ndarray]] = None
    selected: Optional[np.ndarray] = None
    flagged: Optional[np.ndarray] = None
    window: Optional[tuple[float, float]] = None


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    points: list[PointResult]
    fits: list[analysis.PowerLawFit] = field(default_factory=list)


def _apply_sweep(config: ScenarioConfig, value: float) -> tuple[LightModel, list]:
    """Source model and stage list with one sweep parameter overridden."""
    src = config.source
    chain = list(config.stages)
    param = config.sweep.parameter if config.sweep else None
    if param == "pump_power":
        src = dataclasses.replace(src, mean_photons=value)
    elif param == "quad_ratio":
        src = dataclasses.replace(src, kind=Kind.GAUSSIAN_QUADRATURE,
                                  quad_ratio=value)
    elif param == "wavelength_nm":
        src = dataclasses.replace(src, kind=Kind.GAUSSIAN_QUADRATURE,
                                  quad_ratio=quad_ratio_from_wavelength(value))
    elif param == "kappa":
        idx = [i for i, s in enumerate(chain) if isinstance(s, stages.Absorber)]
        if not idx:
            raise ConfigError("kappa sweep requires an absorber stage")
        chain[idx[0]] = stages.Absorber(value)
    return src, chain


def _select_window(config: ScenarioConfig, point: PointResult,
                   sweep_half_width: Optional[float]) -> tuple[float, float]:
    ps = config.postselect
    tapped = point.monitor_area
    if sweep_half_width is not None:
        center = float(np.median(tapped))
        return center - sweep_half_width, center + sweep_half_width
    if ps.window is not None:
        return ps.window
    if ps.target_g2 is not None:
        return _tune_window_to_g2(tapped, point.pump_total, ps.target_g2,
                                  ps.min_survivors)
    return detection.tune_window(tapped, ps.min_survivors)


def _tune_window_to_g2(tapped: np.ndarray, passed: np.ndarray, target: float,
                       min_survivors: int) -> tuple[float, float]:
    """Widen a median-centered window until the conditional g2 of the
    passed beam reaches the target (post-selection monotonicity makes the
    response monotone in the half-width)."""
    center = float(np.median(tapped))
    scale = float(np.std(tapped)) or 1.0
    h = scale * 1e-3
    best = None
    while h < 100 * scale:
        mask = (tapped >= center - h) & (tapped <= center + h)
        if int(mask.sum()) >= max(min_survivors, 2):
            g2 = analysis.estimate_gn(passed[mask], 2, n_boot=0).value
            best = (center - h, center + h)
            if g2 >= target:
                return best
        h *= 1.15
    if best is None:
        raise detection.EmptySelectionError("window tuning found no viable window")
    return best


def _run_point(config: ScenarioConfig, grid_index: int, param_value: float,
               threads: int) -> PointResult:
    param = config.sweep.parameter if config.sweep else ""
    sweep_hw = (param_value if param == "window_half_width" else None)
    src, chain = _apply_sweep(config, param_value)
    point = PointResult(grid_index, param, param_value)

    ens = lightmodel.sample_ensemble(src, config.pulses, config.seed,
                                     STREAM_SOURCE, threads)
    modes = ens.mode_intensities
    tapped_total = None
    harmonic_energy = None
    phase = "pump"
    for st in chain:
        if isinstance(st, stages.Absorber):
            modes = stages.absorb(modes, st.kappa)
        elif isinstance(st, stages.Sampler):
            tapped_total = modes.sum(axis=1) * st.tap_fraction
            modes = modes * (1.0 - st.tap_fraction)
        elif isinstance(st, stages.Harmonic):
            harmonic_energy = stages.harmonic_yield(modes, st.order, st.eta)
            phase = "harmonic"
        elif isinstance(st, stages.Attenuator):
            if phase == "harmonic":
                harmonic_energy = stages.attenuate(harmonic_energy,
                                                   st.transmission)
            else:
                modes = stages.attenuate(modes, st.transmission)

    point.pump_total = modes.sum(axis=1)
    point.harmonic_energy = harmonic_energy

    flagged = np.zeros(config.pulses, dtype=bool)
    if config.charge_detector is not None:
        monitor_input = (tapped_total if tapped_total is not None
                         else point.pump_total)
        areas, flagged = detection.charge_detect(
            monitor_input, config.charge_detector, config.seed,
            STREAM_CHARGE, threads)
        point.monitor_area = areas
    point.flagged = flagged

    if config.hbt is not None:
        spec = config.hbt.spec
        if config.hbt.target_click_prob is not None:
            mean_e = harmonic_energy[~flagged].mean()
            if mean_e <= 0:
                raise RunError(config.scenario_id, "zero mean harmonic energy")
            eff = min(1.0, 2.0 * config.hbt.target_click_prob / mean_e)
            spec = dataclasses.replace(spec, efficiency=eff)
        point.clicks = detection.hbt_detect(harmonic_energy, spec, config.seed,
                                            STREAM_HBT, threads)

    selected = ~flagged
    if config.postselect is not None:
        if point.monitor_area is None:
            raise ConfigError("post-selection requires a charge detector on "
                              "the monitor branch")
        lo, hi = _select_window(config, point, sweep_hw)
        mask, _ = detection.post_select(point.monitor_area, lo, hi)
        selected &= mask
        point.window = (lo, hi)
        if not selected.any():
            raise detection.EmptySelectionError(
                f"[{config.scenario_id}] selection empty at grid point "
                f"{grid_index}")
    point.selected = selected

    for req in config.analyses:
        est = _evaluate(config, point, req, threads)
        point.estimates[_request_key(req)] = est
    return point


def _request_key(req: AnalysisRequest) -> str:
    return f"{req.estimator}:{req.branch}:{req.order}"


def _evaluate(config: ScenarioConfig, point: PointResult,
              req: AnalysisRequest, threads: int) -> EstimateWithError:
    sel = point.selected
    n = req.order
    boot_seed = config.seed + 7919 * (point.grid_index + 1)
    if req.estimator == "gn_areas":
        if point.monitor_area is None:
            raise ConfigError("gn_areas requires a charge detector")
        return analysis.estimate_gn(point.monitor_area[sel], n, seed=boot_seed)
    if req.estimator == "gn_intensity":
        data = (point.harmonic_energy if req.branch == "harmonic"
                else point.pump_total)
        return analysis.estimate_gn(data[sel], n, seed=boot_seed)
    if req.estimator == "gn_counts":
        qe = (config.charge_detector.quantum_efficiency
              if config.charge_detector else 1.0)
        counts = lightmodel.poissonize(point.pump_total, qe, config.seed,
                                       STREAM_POISSONIZE, threads)
        return analysis.estimate_factorial_gn(counts[sel], n, seed=boot_seed)
    if req.estimator == "hbt_g2":
        n1, n2, nc = point.clicks
        return analysis.hbt_g2(n1[sel], n2[sel], nc[sel], seed=boot_seed)
    if req.estimator == "hbt_predicted":
        src, _ = _apply_sweep(config, point.param_value)
        gs = {k: lightmodel.analytic_gn(src, k) for k in (n, 2 * n)}
        return EstimateWithError(float(analysis.predict_harmonic_g2(gs, n)),
                                 0.0, 0, f"g2_harmonic{n}_predicted")
    if req.estimator == "efficiency":
        return analysis.statistical_efficiency(
            point.harmonic_energy[sel], point.pump_total[sel], n,
            seed=boot_seed)
    if req.estimator == "mean_flux":
        f = point.pump_total[sel]
        return EstimateWithError(float(f.mean()),
                                 float(f.std(ddof=1) / np.sqrt(f.size)),
                                 f.size, "mean_flux")
    if req.estimator == "mean_harmonic":
        e = point.harmonic_energy[sel]
        return EstimateWithError(float(e.mean()),
                                 float(e.std(ddof=1) / np.sqrt(e.size)),
                                 e.size, "mean_harmonic")
    if req.estimator == "selection_fraction":
        return EstimateWithError(float(sel.mean()), 0.0, sel.size,
                                 "selection_fraction")
    raise ConfigError(f"unknown estimator {req.estimator!r}")


def run_scenario(config: ScenarioConfig, threads: int = 1) -> ScenarioResult:
    """Execute all grid points and any cross-sweep power-law fits."""
    values = config.sweep.values if config.sweep else (float("nan"),)
    points = [_run_point(config, i, v, threads) for i, v in enumerate(values)]

    def _column(point: PointResult, estimator: str) -> float:
        for key, est in point.estimates.items():
            if key.startswith(estimator + ":"):
                return est.value
        raise ConfigError(f"fits require a {estimator!r} analysis")

    fits = []
    for freq in config.fits:
        flux = [_column(p, "mean_flux") for p in points]
        rate = [_column(p, "mean_harmonic") for p in points]
        fits.append(analysis.fit_power_law(flux, rate, freq.order,
                                           freq.fix_exponent))
    return ScenarioResult(config, points, fits)


# ---------------------------------------------------------------------------
# output files

def _fmt(x) -> str:
    """Shortest round-trip decimal for floats; plain text otherwise."""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, np.integer):
        return str(int(x))
    return str(x)


SUMMARY_COLUMNS = ("scenario_id", "grid_index", "parameter", "param_value",
                   "estimator_id", "order", "value", "std_error", "samples",
                   "seed")


def summary_rows(result: ScenarioResult) -> list[dict]:
    rows = []
    cfg = result.config
    for p in result.points:
        for key, est in p.estimates.items():
            order = int(key.rsplit(":", 1)[1])
            rows.append({
                "scenario_id": cfg.scenario_id, "grid_index": p.grid_index,
                "parameter": p.parameter, "param_value": p.param_value,
                "estimator_id": est.estimator_id, "order": order,
                "value": est.value, "std_error": est.std_error,
                "samples": est.samples, "seed": cfg.seed})
    for fit in result.fits:
        for est in filter(None, (fit.coefficient, fit.exponent)):
            rows.append({
                "scenario_id": cfg.scenario_id, "grid_index": -1,
                "parameter": "fit", "param_value": float("nan"),
                "estimator_id": est.estimator_id, "order": fit.order,
                "value": est.value, "std_error": est.std_error,
                "samples": est.samples, "seed": cfg.seed})
    return rows


def _write_csv(path: Path, columns, rows, header_comment: str):
    with open(path, "w") as fh:
        fh.write(header_comment)
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[c]) for c in columns) + "\n")


def _write_jsonl(path: Path, columns, rows, header_comment: str):
    with open(path, "w") as fh:
        for row in rows:
            fh.write(json.dumps({c: row[c] for c in columns}) + "\n")


def pulse_record_rows(result: ScenarioResult):
    """Yield per-pulse rows across grid points, with a status column."""
    for p in result.points:
        n1, n2, nc = p.clicks if p.clicks is not None else (None, None, None)
        for i in range(p.pump_total.shape[0]):
            status = ("saturated" if p.flagged[i]
                      else ("selected" if p.selected[i] else "rejected"))
            yield {
                "grid_index": p.grid_index,
                "pulse_index": i,
                "pump_total": float(p.pump_total[i]),
                "monitor_area": (float(p.monitor_area[i])
                                 if p.monitor_area is not None else ""),
                "harmonic_energy": (float(p.harmonic_energy[i])
                                    if p.harmonic_energy is not None else ""),
                "click1": int(n1[i]) if n1 is not None else "",
                "click2": int(n2[i]) if n2 is not None else "",
                "coincidence": int(nc[i]) if nc is not None else "",
                "status": status,
            }


PULSE_COLUMNS = ("grid_index", "pulse_index", "pump_total", "monitor_area",
                 "harmonic_energy", "click1", "click2", "coincidence",
                 "status")


def write_outputs(result: ScenarioResult, out_dir, fmt: str = "csv") -> Path:
    """Write the summary table and (optionally) chunked pulse records.

    Returns the scenario output directory. Timestamps appear only in a
    comment header, never in payload rows.
    """
    if fmt not in ("csv", "jsonl"):
        raise ConfigError(f"unknown output format {fmt!r}")
    base = Path(out_dir) / result.config.scenario_id
    base.mkdir(parents=True, exist_ok=True)
    stamp = f"# written {time.strftime('%Y-%m-%dT%H:%M:%S')}\n"
    writer = _write_csv if fmt == "csv" else _write_jsonl
    ext = fmt if fmt == "csv" else "jsonl"

    writer(base / f"summary.{ext}", SUMMARY_COLUMNS, summary_rows(result), stamp)

    if result.config.write_pulse_records:
        chunk, idx = [], 0
        for row in pulse_record_rows(result):
            chunk.append(row)
            if len(chunk) == PULSE_FILE_CHUNK:
                writer(base / f"pulses_{idx:03d}.{ext}", PULSE_COLUMNS, chunk,
                       stamp)
                chunk, idx = [], idx + 1
        if chunk:
            writer(base / f"pulses_{idx:03d}.{ext}", PULSE_COLUMNS, chunk, stamp)
    return base


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, "out"))


def run(config: ScenarioConfig, out_dir=None, threads: int = 1,
        fmt: str = "csv") -> ScenarioResult:
    """Run a scenario and write its dataset and summary files."""
    result = run_scenario(config, threads)
    write_outputs(result, out_dir if out_dir is not None
                  else default_output_dir(), fmt)
    return result
