"""Figure rendering from scan and scaling CSVs."""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .csvio import SchemaError, read_rows, require_columns
from .fits import fit_power_law

# fixed salt plus a scrubbed date make repeated SVG renders byte-identical;
# real text (not glyph paths) keeps slope annotations greppable in the file
matplotlib.rcParams["svg.hashsalt"] = "sfplots"
matplotlib.rcParams["svg.fonttype"] = "none"

PROTOCOL_STYLE = {
    "SP": {"marker": "o", "color": "black", "fillstyle": "full"},
    "HA": {"marker": "s", "color": "tab:red", "fillstyle": "none"},
}


@dataclass
class PlotSpec:
    inputs: list
    output: str
    kind: str  # "theta_curves" | "scaling_loglog"
    x_label: str = ""
    y_label: str = ""
    fit_overlay: bool = True
    gamma_c: dict = field(default_factory=dict)  # protocol -> guide position

    def validate(self):
        if self.kind not in ("theta_curves", "scaling_loglog"):
            raise ValueError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise ValueError("need at least one input CSV")
        for path in self.inputs:
            if not os.path.exists(path):
                raise FileNotFoundError(path)


def _load(spec, columns):
    spec.validate()
    rows = []
    for path in spec.inputs:
        chunk = read_rows(path)
        require_columns(chunk, columns, path)
        rows.extend(chunk)
    return rows


def _style(protocol):
    return PROTOCOL_STYLE.get(protocol, {"marker": "^", "fillstyle": "full"})


def _save(fig, path):
    fig.savefig(path, metadata={"Date": None} if path.endswith(".svg") else None)
    plt.close(fig)


def plot_theta_curves(spec: PlotSpec) -> str:
    """Order parameter versus injection rate, one series per protocol."""
    rows = _load(spec, ["protocol", "gamma", "theta"])
    protocols = sorted({r["protocol"] for r in rows})
    fig, ax = plt.subplots(figsize=(5.0, 3.6), constrained_layout=True)
    for protocol in protocols:
        grouped = {}
        for r in rows:
            if r["protocol"] == protocol:
                grouped.setdefault(r["gamma"], []).append(r["theta"])
        gammas = np.array(sorted(grouped))
        thetas = np.array([np.mean(grouped[g]) for g in gammas])
        ax.plot(
            gammas,
            thetas,
            linestyle="-",
            label=protocol,
            **_style(protocol),
        )
        guide = spec.gamma_c.get(protocol)
        if guide is not None:
            ax.axvline(
                guide,
                color=_style(protocol).get("color", "gray"),
                linestyle=":",
                linewidth=1,
            )
    ax.set_xlabel(spec.x_label or r"$\gamma$")
    ax.set_ylabel(spec.y_label or r"$\theta$")
    ax.set_ylim(bottom=0)
    ax.legend()
    _save(fig, spec.output)
    return spec.output


def plot_scaling_loglog(spec: PlotSpec) -> str:
    """Median maximal betweenness versus system size on log-log axes."""
    rows = _load(spec, ["N", "protocol", "B"])
    protocols = sorted({r["protocol"] for r in rows})
    fig, ax = plt.subplots(figsize=(5.0, 3.6), constrained_layout=True)
    for protocol in protocols:
        pairs = [(r["N"], r["B"]) for r in rows if r["protocol"] == protocol]
        fit = fit_power_law(pairs)
        label = protocol
        if spec.fit_overlay:
            label = f"{protocol} (slope {fit.slope:.3f})"
            line = np.exp(fit.intercept) * fit.ns**fit.slope
            ax.plot(
                fit.ns,
                line,
                linestyle="--",
                linewidth=1,
                color=_style(protocol).get("color", "gray"),
            )
        ax.plot(
            fit.ns,
            fit.medians,
            linestyle="none",
            label=label,
            **_style(protocol),
        )
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(spec.x_label or r"$N$")
    ax.set_ylabel(spec.y_label or r"$B$")
    ax.legend()
    _save(fig, spec.output)
    return spec.output
