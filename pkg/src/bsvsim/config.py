"""Declarative scenario descriptions and their TOML loader.

A scenario wires one light source through an ordered stage chain into
detectors and estimator requests. Unknown keys in a config file are
errors, not warnings: a typo must never silently change an experiment.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .detection import ChargeDetectorSpec, ClickPairSpec
from .lightmodel import Kind, LightModel
from .stages import Absorber, Attenuator, Harmonic, Sampler

StageSpec = Union[Absorber, Harmonic, Attenuator, Sampler]

SWEEP_PARAMETERS = ("pump_power", "quad_ratio", "wavelength_nm", "kappa",
                    "window_half_width")

ESTIMATORS = ("gn_areas", "gn_intensity", "gn_counts", "hbt_g2",
              "hbt_predicted", "efficiency", "mean_flux", "mean_harmonic",
              "selection_fraction")

# Default wavelength -> quadrature-ratio map: degenerate at 1600 nm,
# fully thermal beyond +/- 25 nm detuning. A declared stand-in, not a
# claim about the physical detuning law.
WL_DEGENERATE_NM = 1600.0
WL_SCALE_NM = 25.0


def quad_ratio_from_wavelength(wavelength_nm: float,
                               scale_nm: float = WL_SCALE_NM) -> float:
    return min(1.0, abs(wavelength_nm - WL_DEGENERATE_NM) / scale_nm)


class ConfigError(ValueError):
    """Invalid or inconsistent scenario configuration."""


@dataclass(frozen=True)
class HbtSettings:
    """Click-pair placement on the harmonic branch.

    If target_click_prob is set, the arm efficiency is calibrated at run
    time so the mean per-arm click probability hits the target; otherwise
    ``spec.efficiency`` is used as-is.
    """
    spec: ClickPairSpec = ClickPairSpec()
    target_click_prob: Optional[float] = None


@dataclass(frozen=True)
class PostSelectSettings:
    """Window selection on the tapped monitor branch.

    Exactly one of: an explicit window, a target conditional g2 on the
    passed beam (window widened until the target is reached), or the
    default median-centered window with >= min_survivors pulses.
    """
    window: Optional[tuple[float, float]] = None
    target_g2: Optional[float] = None
    min_survivors: int = 1000


@dataclass(frozen=True)
class AnalysisRequest:
    estimator: str
    order: int = 2
    branch: str = "pump"

    def __post_init__(self):
        if self.estimator not in ESTIMATORS:
            raise ConfigError(f"unknown estimator {self.estimator!r}")
        if self.branch not in ("pump", "harmonic", "monitor"):
            raise ConfigError(f"unknown branch {self.branch!r}")


@dataclass(frozen=True)
class FitRequest:
    """Power-law fit of mean harmonic rate vs mean pump flux across a sweep."""
    order: int
    fix_exponent: bool = True


@dataclass(frozen=True)
class Sweep:
    parameter: str
    values: tuple[float, ...]

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ConfigError(f"unknown sweep parameter {self.parameter!r}")
        if len(self.values) < 1:
            raise ConfigError("sweep needs at least one value")


@dataclass
class ScenarioConfig:
    scenario_id: str
    source: LightModel
    pulses: int
    seed: int
    stages: list[StageSpec] = field(default_factory=list)
    charge_detector: Optional[ChargeDetectorSpec] = None
    hbt: Optional[HbtSettings] = None
    postselect: Optional[PostSelectSettings] = None
    analyses: list[AnalysisRequest] = field(default_factory=list)
    fits: list[FitRequest] = field(default_factory=list)
    sweep: Optional[Sweep] = None
    write_pulse_records: bool = True

    def __post_init__(self):
        if self.pulses < 1:
            raise ConfigError("pulses must be >= 1")
        self.validate_chain()

    def validate_chain(self):
        """Stage chain is linear and typed: pump-phase stages cannot
        follow the harmonic stage, and at most one harmonic is allowed."""
        phase = "pump"
        for st in self.stages:
            if isinstance(st, Harmonic):
                if phase == "harmonic":
                    raise ConfigError("only one harmonic stage allowed")
                phase = "harmonic"
            elif isinstance(st, (Absorber, Sampler)):
                if phase == "harmonic":
                    raise ConfigError(
                        f"{type(st).__name__} cannot follow the harmonic stage")
            elif not isinstance(st, Attenuator):
                raise ConfigError(f"unknown stage {st!r}")
        if self.hbt is not None and self.harmonic_order is None:
            raise ConfigError("HBT detector requires a harmonic stage")
        if self.postselect is not None and not any(
                isinstance(s, Sampler) for s in self.stages):
            raise ConfigError("post-selection requires a sampler stage")
        for a in self.analyses:
            if a.branch == "harmonic" and self.harmonic_order is None:
                raise ConfigError(f"{a.estimator} on harmonic branch needs a "
                                  "harmonic stage")
            if a.estimator == "hbt_g2" and self.hbt is None:
                raise ConfigError("hbt_g2 requested without an HBT detector")
        if self.fits and self.sweep is None:
            raise ConfigError("power-law fits require a sweep")

    @property
    def harmonic_order(self) -> Optional[int]:
        for st in self.stages:
            if isinstance(st, Harmonic):
                return st.order
        return None


def _check_keys(table: dict, allowed: set[str], where: str):
    unknown = set(table) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")


def _parse_source(t: dict) -> LightModel:
    _check_keys(t, {"kind", "mean_photons", "quad_ratio", "temporal_modes",
                    "wavelength_nm"}, "[source]")
    kind = t.get("kind")
    if kind not in ("coherent", "thermal", "bsv"):
        raise ConfigError(f"source kind must be coherent|thermal|bsv, got {kind!r}")
    if "mean_photons" not in t:
        raise ConfigError("[source] requires mean_photons")
    mean = float(t["mean_photons"])
    modes = int(t.get("temporal_modes", 1))
    if kind == "coherent":
        return LightModel(Kind.COHERENT, mean, 0.0, modes)
    if kind == "thermal":
        r = 1.0
    elif "wavelength_nm" in t:
        r = quad_ratio_from_wavelength(float(t["wavelength_nm"]))
    else:
        r = float(t.get("quad_ratio", 0.0))
    try:
        return LightModel(Kind.GAUSSIAN_QUADRATURE, mean, r, modes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_stage(t: dict, i: int) -> StageSpec:
    where = f"[[stages]] #{i}"
    kind = t.get("type")
    try:
        if kind == "absorber":
            _check_keys(t, {"type", "kappa"}, where)
            return Absorber(float(t["kappa"]))
        if kind == "harmonic":
            _check_keys(t, {"type", "order", "eta"}, where)
            return Harmonic(int(t["order"]), float(t.get("eta", 1.0)))
        if kind == "attenuator":
            _check_keys(t, {"type", "transmission"}, where)
            return Attenuator(float(t["transmission"]))
        if kind == "sampler":
            _check_keys(t, {"type", "tap_fraction"}, where)
            return Sampler(float(t["tap_fraction"]))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where}: unknown stage type {kind!r}")


def _parse_charge(t: dict) -> ChargeDetectorSpec:
    _check_keys(t, {"gain", "quantum_efficiency", "noise_photons",
                    "saturation", "deterministic"}, "[detectors.charge]")
    try:
        return ChargeDetectorSpec(
            gain=float(t.get("gain", 5.0)),
            quantum_efficiency=float(t.get("quantum_efficiency", 0.85)),
            noise_photons=float(t.get("noise_photons", 1600.0)),
            saturation=(float(t["saturation"]) if "saturation" in t else None),
            deterministic=bool(t.get("deterministic", False)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_hbt(t: dict) -> HbtSettings:
    _check_keys(t, {"efficiency", "splitting_ratio", "dark_count_prob",
                    "target_click_prob"}, "[detectors.hbt]")
    try:
        spec = ClickPairSpec(
            efficiency=float(t.get("efficiency", 1.0)),
            splitting_ratio=float(t.get("splitting_ratio", 0.5)),
            dark_count_prob=float(t.get("dark_count_prob", 0.0)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    target = t.get("target_click_prob")
    return HbtSettings(spec, None if target is None else float(target))


def _parse_postselect(t: dict) -> PostSelectSettings:
    _check_keys(t, {"window", "target_g2", "min_survivors"}, "[postselect]")
    window = t.get("window")
    if window is not None:
        if len(window) != 2:
            raise ConfigError("[postselect] window must be [lo, hi]")
        window = (float(window[0]), float(window[1]))
    return PostSelectSettings(
        window=window,
        target_g2=(float(t["target_g2"]) if "target_g2" in t else None),
        min_survivors=int(t.get("min_survivors", 1000)))


def from_dict(data: dict) -> ScenarioConfig:
    _check_keys(data, {"scenario_id", "pulses", "seed", "source", "stages",
                       "detectors", "postselect", "analyses", "fits", "sweep",
                       "write_pulse_records"}, "top level")
    for key in ("scenario_id", "pulses", "seed", "source"):
        if key not in data:
            raise ConfigError(f"missing required key {key!r}")

    stages = [_parse_stage(t, i) for i, t in enumerate(data.get("stages", []))]

    detectors = data.get("detectors", {})
    _check_keys(detectors, {"charge", "hbt"}, "[detectors]")
    charge = _parse_charge(detectors["charge"]) if "charge" in detectors else None
    hbt = _parse_hbt(detectors["hbt"]) if "hbt" in detectors else None

    analyses = []
    for i, t in enumerate(data.get("analyses", [])):
        _check_keys(t, {"estimator", "order", "branch"}, f"[[analyses]] #{i}")
        if "estimator" not in t:
            raise ConfigError(f"[[analyses]] #{i}: missing estimator")
        analyses.append(AnalysisRequest(t["estimator"], int(t.get("order", 2)),
                                        t.get("branch", "pump")))

    fits = []
    for i, t in enumerate(data.get("fits", [])):
        _check_keys(t, {"order", "fix_exponent"}, f"[[fits]] #{i}")
        fits.append(FitRequest(int(t["order"]), bool(t.get("fix_exponent", True))))

    sweep = None
    if "sweep" in data:
        t = data["sweep"]
        _check_keys(t, {"parameter", "values"}, "[sweep]")
        sweep = Sweep(t.get("parameter", ""), tuple(float(v) for v in t["values"]))

    postselect = (_parse_postselect(data["postselect"])
                  if "postselect" in data else None)

    try:
        return ScenarioConfig(
            scenario_id=str(data["scenario_id"]),
            source=_parse_source(data["source"]),
            pulses=int(data["pulses"]),
            seed=int(data["seed"]),
            stages=stages,
            charge_detector=charge,
            hbt=hbt,
            postselect=postselect,
            analyses=analyses,
            fits=fits,
            sweep=sweep,
            write_pulse_records=bool(data.get("write_pulse_records", True)))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def load(path: Union[str, Path]) -> ScenarioConfig:
    """Load and validate a scenario from a TOML file."""
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return from_dict(data)
