"""The three figure kinds rendered from run artifacts.

marginal_heatmap   time on x, p1 bins on y, mass as color
ternary_trajectory mean-strategy orbit of a 3-strategy game in barycentric
                   coordinates
convergence_curve  micro-to-meanfield distance against interaction strength
                   on log-log axes

Every figure embeds the run's config hash both as a caption and in the
PNG metadata, so provenance survives copy-paste.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .artifacts import SchemaMismatch, read_summary, read_table, read_timeseries

KINDS = ("marginal_heatmap", "ternary_trajectory", "convergence_curve")

DEFAULT_INPUTS = {
    "marginal_heatmap": "hist_p1.csv",
    "ternary_trajectory": "timeseries_mean.csv",
    "convergence_curve": "conv_table.csv",
}


@dataclass
class FigureSpec:
    kind: str
    run_dir: str
    out_path: str
    bins: int | None = None
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")

    @property
    def input_path(self) -> Path:
        override = self.style.get("input")
        return Path(self.run_dir) / (override or DEFAULT_INPUTS[self.kind])


def _finish(fig, spec: FigureSpec, cfg_hash: str) -> str:
    fig.text(0.99, 0.01, f"config {cfg_hash}", ha="right", va="bottom",
             fontsize=7, color="0.4")
    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=spec.style.get("dpi", 150),
                metadata={"Description": f"config_hash={cfg_hash}"})
    plt.close(fig)
    return str(out)


def _rebin(masses: np.ndarray, n_bins: int) -> np.ndarray:
    if masses.shape[1] == n_bins:
        return masses
    if masses.shape[1] % n_bins:
        raise SchemaMismatch(f"cannot rebin {masses.shape[1]} bins into {n_bins}")
    factor = masses.shape[1] // n_bins
    return masses.reshape(masses.shape[0], n_bins, factor).sum(axis=2)


def render_marginal_heatmap(spec: FigureSpec) -> str:
    summary = read_summary(spec.run_dir)
    table = read_table(spec.input_path, ["time", "edge_lo", "edge_hi", "mass"])
    times = np.unique(table["time"])
    edges_lo = np.unique(table["edge_lo"])
    n_bins = edges_lo.size
    if times.size * n_bins != table["time"].size:
        raise SchemaMismatch("histogram series is not a complete time x bin grid")
    order = np.lexsort((table["edge_lo"], table["time"]))
    masses = table["mass"][order].reshape(times.size, n_bins)
    if spec.bins:
        masses = _rebin(masses, spec.bins)
        n_bins = spec.bins

    fig, ax = plt.subplots(figsize=(8, 4.5))
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    mesh = ax.pcolormesh(times, centers, masses.T, cmap=spec.style.get("cmap", "viridis"),
                         shading="nearest")
    fig.colorbar(mesh, ax=ax, label="mass")
    ax.set_xlabel(spec.style.get("xlabel", "time"))
    ax.set_ylabel(spec.style.get("ylabel", "first-strategy probability"))
    ax.set_title("distribution of the first-strategy probability over time")
    return _finish(fig, spec, summary["config_hash"])


_SQRT3_2 = np.sqrt(3.0) / 2.0
_CORNERS = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, _SQRT3_2]])


def _barycentric_xy(states: np.ndarray) -> np.ndarray:
    return states @ _CORNERS


def render_ternary_trajectory(spec: FigureSpec) -> str:
    summary = read_summary(spec.run_dir)
    times, states = read_timeseries(spec.input_path)
    if states.shape[1] != 3:
        raise SchemaMismatch(f"ternary plot needs 3 strategies, artifact has "
                             f"{states.shape[1]}")
    xy = _barycentric_xy(states)
    fig, ax = plt.subplots(figsize=(6, 5.5))
    tri = np.vstack([_CORNERS, _CORNERS[0]])
    ax.plot(tri[:, 0], tri[:, 1], color="0.2", lw=1.0)
    pts = ax.scatter(xy[:, 0], xy[:, 1], c=times, s=4,
                     cmap=spec.style.get("cmap", "plasma"))
    fig.colorbar(pts, ax=ax, label="time")
    center = _barycentric_xy(np.full((1, 3), 1 / 3))
    ax.plot(*center[0], marker="+", color="red", ms=10)
    for label, (x, y) in zip(("s1", "s2", "s3"), _CORNERS):
        ax.annotate(label, (x, y), textcoords="offset points", xytext=(0, 4),
                    ha="center", fontsize=9)
    ax.set_aspect("equal")
    ax.set_axis_off()
    ax.set_title("mean-strategy trajectory")
    return _finish(fig, spec, summary["config_hash"])


def render_convergence_curve(spec: FigureSpec) -> str:
    summary = read_summary(spec.run_dir)
    table = read_table(spec.input_path, ["delta", "n_seeds", "mean_w1", "stderr_w1"])
    order = np.argsort(table["delta"])
    delta = table["delta"][order]
    mean = table["mean_w1"][order]
    err = table["stderr_w1"][order]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.errorbar(delta, mean, yerr=2 * err, marker="o", capsize=3)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(spec.style.get("xlabel", "interaction strength"))
    ax.set_ylabel(spec.style.get("ylabel", "sliced W1 to the mean-field solution"))
    ax.set_title("convergence toward the mean-field limit")
    ax.grid(True, which="both", alpha=0.3)
    return _finish(fig, spec, summary["config_hash"])


_RENDERERS = {
    "marginal_heatmap": render_marginal_heatmap,
    "ternary_trajectory": render_ternary_trajectory,
    "convergence_curve": render_convergence_curve,
}


def render(spec: FigureSpec) -> str:
    """Render one figure; returns the written image path."""
    return _RENDERERS[spec.kind](spec)
