"""Rendering: multi-frame snapshot panels and area-evolution plots.

All numbers come from the artifact files; the only logic here is layout
and styling.  Styling convention: solid pump, dashed Stokes, dot-dashed
total Rabi envelope.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .schema import RunData, SchemaError

# keep rendered files byte-stable across identical inputs
_SAVE_KWARGS = {"dpi": 140, "metadata": {"Software": None}}


def _frame_grid(n: int):
    cols = 3 if n > 4 else 2 if n > 1 else 1
    rows = (n + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(3.4 * cols, 2.6 * rows),
                             squeeze=False, sharex=True)
    return fig, axes.ravel()


def render_frames(run: RunData, observable: str = "pulses",
                  out: Path | None = None):
    """One panel per stored depth.

    ``observable`` selects what each panel shows: ``pulses`` draws the
    pump (solid), Stokes (dashed) and total (dot-dashed) envelopes scaled
    to units of 1/tau; ``rho33`` and ``rho_dd`` draw the line-center
    atomic profiles.  Returns the matplotlib figure; saves it when ``out``
    is given.
    """
    if observable not in ("pulses", "rho33", "rho_dd"):
        raise SchemaError(f"unknown observable {observable!r}")
    if not run.snapshots:
        raise SchemaError(f"no snapshots in {run.directory}")
    tau = run.tau
    fig, axes = _frame_grid(len(run.snapshots))
    for ax in axes[len(run.snapshots):]:
        ax.set_visible(False)
    for i, (ax, snap) in enumerate(zip(axes, run.snapshots)):
        t_scaled = snap.t / tau
        if observable == "pulses":
            pump = snap.omega_a.real * tau
            stokes = snap.omega_b.real * tau
            total = np.hypot(np.abs(snap.omega_a), np.abs(snap.omega_b)) * tau
            ax.plot(t_scaled, pump, "-", color="C0", lw=1.4)
            ax.plot(t_scaled, stokes, "--", color="C1", lw=1.4)
            ax.plot(t_scaled, total, "-.", color="0.4", lw=0.9)
            ax.set_ylabel(r"$\Omega\,\tau$")
        elif observable == "rho33":
            ax.plot(t_scaled, snap.rho33, "-", color="C2", lw=1.4)
            ax.set_ylim(-0.02, 1.02)
            ax.set_ylabel(r"$\rho_{33}$")
        else:
            ax.plot(t_scaled, snap.rho_dd, "-", color="C3", lw=1.4)
            ax.set_ylim(-0.02, 1.02)
            ax.set_ylabel(r"$\rho_{DD}$")
        ax.set_title(f"$\\kappa Z = {snap.z * run.kappa:.2f}$  ({i + 1})",
                     fontsize=9)
        ax.set_xlabel(r"$T/\tau$")
    fig.tight_layout()
    if out is not None:
        fig.savefig(out, **_SAVE_KWARGS)
    return fig


def render_area_plot(areas: dict, kappa: float, out: Path | None = None,
                     x_unit: str = "kappa"):
    """Pulse-area evolution: pump solid, Stokes dashed, total dot-dashed,
    with the 2 pi reference line."""
    for key in ("z", "area_pump", "area_stokes", "area_total"):
        if key not in areas:
            raise SchemaError(f"areas table lacks column {key}")
    x = areas["z"] * kappa if x_unit == "kappa" else areas["z"]
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    ax.plot(x, areas["area_pump"] / np.pi, "-", color="C0", lw=1.5,
            label="pump")
    ax.plot(x, areas["area_stokes"] / np.pi, "--", color="C1", lw=1.5,
            label="Stokes")
    ax.plot(x, areas["area_total"] / np.pi, "-.", color="0.35", lw=1.5,
            label="total")
    ax.axhline(2.0, color="0.7", lw=0.8, zorder=0)
    ax.set_xlabel(r"$\kappa Z$" if x_unit == "kappa" else r"$Z$")
    ax.set_ylabel(r"pulse area / $\pi$")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    if out is not None:
        fig.savefig(out, **_SAVE_KWARGS)
    return fig


def render_zeta_curves(summaries: dict[str, dict], out: Path | None = None):
    """Interaction parameter against the coherence parameter, one curve
    per population split."""
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    for label, table in sorted(summaries.items()):
        if "lambda" not in table or "zeta" not in table:
            raise SchemaError(f"summary for {label} lacks lambda/zeta")
        ax.plot(table["lambda"], table["zeta"], lw=1.5, label=label)
    ax.set_xlabel(r"coherence $\lambda$")
    ax.set_ylabel(r"interaction parameter $\zeta$")
    ax.set_ylim(0.45, 1.02)
    ax.legend(fontsize=8)
    fig.tight_layout()
    if out is not None:
        fig.savefig(out, **_SAVE_KWARGS)
    return fig
