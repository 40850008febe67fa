"""Figure builders: each preset maps a summary CSV onto one figure.

Rendering is read-only and never recomputes statistics — every number
shown (values, error bars, bar heights, labels) is taken verbatim from
the input rows.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .schema import SchemaError, read_summary, require_estimators  # noqa: E402

PRESETS = ("fig1c", "fig2", "fig3", "fig4")

_ORDER_RE = re.compile(r"-h(\d+)$")
_COLORS = {2: "tab:blue", 3: "tab:orange", 4: "tab:green"}


@dataclass(frozen=True)
class FigureSpec:
    preset: str
    input_path: Path
    output_path: Path
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise SchemaError(f"unknown figure preset {self.preset!r}; "
                              f"choose from {PRESETS}")


def _scenario_order(scenario_id: str) -> int:
    m = _ORDER_RE.search(scenario_id)
    if not m:
        raise SchemaError(f"scenario_id {scenario_id!r} lacks an -h<n> "
                          "harmonic-order suffix")
    return int(m.group(1))


def _by_scenario(rows: list[dict]) -> dict[str, list[dict]]:
    grouped: dict[str, list[dict]] = {}
    for row in rows:
        grouped.setdefault(row["scenario_id"], []).append(row)
    return grouped


def _series(rows: list[dict], estimator_prefix: str) -> list[dict]:
    picked = [r for r in rows if r["estimator_id"].startswith(estimator_prefix)]
    return sorted(picked, key=lambda r: r["grid_index"])


def _bar_label(value: float) -> str:
    if value >= 100 or abs(value - round(value)) < 0.2:
        return f"{value:.0f}"
    return f"{value:.1f}"


def build_fig1c(rows: list[dict]) -> plt.Figure:
    """Log-log harmonic energy vs pump flux with slope-n guide lines."""
    require_estimators(rows, {"mean_flux", "mean_harmonic"}, "fig1c input")
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    for scenario_id, srows in sorted(_by_scenario(rows).items()):
        n = _scenario_order(scenario_id)
        flux = [r["value"] for r in _series(srows, "mean_flux")]
        harm = [r["value"] for r in _series(srows, "mean_harmonic")]
        if not flux or len(flux) != len(harm):
            raise SchemaError(f"{scenario_id}: flux/harmonic rows mismatched")
        style = "o" if "-bsv-" in scenario_id else "s"
        ax.plot(flux, harm, style, ms=4, color=_COLORS.get(n, "gray"),
                label=scenario_id)
        # slope-n guide through the first point
        guide = [harm[0] * (f / flux[0]) ** n for f in flux]
        ax.plot(flux, guide, "--", lw=0.8, color=_COLORS.get(n, "gray"))
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("pump flux (photons/pulse)")
    ax.set_ylabel("harmonic energy (arb. units)")
    ax.legend(fontsize=7)
    fig.tight_layout()
    return fig


def build_fig2(rows: list[dict]) -> plt.Figure:
    """Measured g(n) across the wavelength scan, one curve per order."""
    require_estimators(rows, {"g"}, "fig2 input")
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    plotted = False
    for scenario_id, srows in sorted(_by_scenario(rows).items()):
        n = _scenario_order(scenario_id)
        series = [r for r in _series(srows, f"g{n}_")
                  if r["parameter"] == "wavelength_nm"]
        if not series:
            continue
        ax.errorbar([r["param_value"] for r in series],
                    [r["value"] for r in series],
                    yerr=[r["std_error"] for r in series],
                    fmt="o-", ms=4, color=_COLORS.get(n, "gray"),
                    label=f"$g^{{({n})}}$")
        plotted = True
    if not plotted:
        raise SchemaError("fig2 input: no wavelength_nm sweep rows")
    ax.set_yscale("log")
    ax.set_xlabel("wavelength (nm)")
    ax.set_ylabel("$g^{(n)}$")
    ax.legend()
    fig.tight_layout()
    return fig


def build_fig3(rows: list[dict]) -> plt.Figure:
    """Statistical efficiency vs correlation function, per order."""
    require_estimators(rows, {"xi"}, "fig3 input")
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    plotted = False
    for scenario_id, srows in sorted(_by_scenario(rows).items()):
        n = _scenario_order(scenario_id)
        g = [r["value"] for r in _series(srows, f"g{n}_")
             if r["order"] == n]
        xi = [r["value"] for r in _series(srows, f"xi{n}")]
        if not g or len(g) != len(xi):
            continue
        ax.plot(g, xi, "o-", ms=4, color=_COLORS.get(n, "gray"),
                label=f"n = {n}")
        plotted = True
    if not plotted:
        raise SchemaError("fig3 input: no paired g(n)/xi(n) rows")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("$g^{(n)}$")
    ax.set_ylabel(r"$\xi^{(n)}$ (arb. units)")
    ax.legend()
    fig.tight_layout()
    return fig


def build_fig4(rows: list[dict]) -> plt.Figure:
    """Bars at the predicted harmonic g2 values with measured
    coincidence points (error bars) overlaid."""
    require_estimators(rows, {"g2_hbt", "g2_harmonic"}, "fig4 input")
    entries = []
    for scenario_id, srows in sorted(_by_scenario(rows).items()):
        n = _scenario_order(scenario_id)
        measured = _series(srows, "g2_hbt")
        predicted = _series(srows, "g2_harmonic")
        if not measured or not predicted:
            raise SchemaError(f"{scenario_id}: needs both g2_hbt and "
                              "g2_harmonic*_predicted rows")
        tag = scenario_id.split("-")[1] if "-" in scenario_id else scenario_id
        entries.append((tag, n, predicted[0]["value"],
                        measured[0]["value"], measured[0]["std_error"]))
    entries.sort(key=lambda e: (e[1], e[0]))

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    xs = range(len(entries))
    bars = ax.bar(xs, [e[2] for e in entries], width=0.6, alpha=0.45,
                  color=[_COLORS.get(e[1], "gray") for e in entries],
                  label="predicted $g^{(2n)}/g^{(n)2}$")
    for x, bar, entry in zip(xs, bars, entries):
        ax.annotate(_bar_label(entry[2]),
                    (bar.get_x() + bar.get_width() / 2, entry[2]),
                    textcoords="offset points", xytext=(0, 3),
                    ha="center", fontsize=8)
    ax.errorbar(list(xs), [e[3] for e in entries],
                yerr=[e[4] for e in entries], fmt="ko", ms=4, capsize=3,
                label="measured (coincidences)")
    ax.set_xticks(list(xs))
    ax.set_xticklabels([f"{tag}\nh{n}" for tag, n, *_ in entries], fontsize=8)
    ax.set_yscale("log")
    ax.set_ylabel("harmonic $g^{(2)}$")
    ax.legend()
    fig.tight_layout()
    return fig


_BUILDERS = {"fig1c": build_fig1c, "fig2": build_fig2, "fig3": build_fig3,
             "fig4": build_fig4}


def build(spec: FigureSpec) -> plt.Figure:
    rows = read_summary(spec.input_path)
    with plt.rc_context(spec.style):
        return _BUILDERS[spec.preset](rows)


def render(spec: FigureSpec) -> Path:
    """Build the figure and write it; vector output (SVG) by default."""
    fig = build(spec)
    out = Path(spec.output_path)
    if not out.suffix:
        out = out.with_suffix(".svg")
    try:
        fig.savefig(out)
    finally:
        plt.close(fig)
    return out
