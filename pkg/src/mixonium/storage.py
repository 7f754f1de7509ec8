"""Trajectory persistence: CSV series, JSON manifest.

The on-disk layout is the stable interface consumed by external tooling
(the figure scripts read these files directly):

    <run dir>/
      manifest.json             resolved configuration + derived constants
      snapshot_0000.csv ...     one file per depth sample
      areas.csv                 per-depth area records

Snapshot CSV columns: ``t, omega_a_re, omega_a_im, omega_b_re,
omega_b_im, rho33, rho_dd``.  Areas CSV columns: ``z, area_pump,
area_stokes, area_total, matching_metric``.  All numbers are written with
17 significant digits so a re-run of the same manifest reproduces the
files byte for byte.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .core import Grid, make_detuning_ensemble, make_medium_preparation
from .propagator import FieldSnapshot, Scenario, Trajectory

SCHEMA_VERSION = 1

SNAPSHOT_COLUMNS = ["t", "omega_a_re", "omega_a_im", "omega_b_re",
                    "omega_b_im", "rho33", "rho_dd"]
AREA_COLUMNS = ["z", "area_pump", "area_stokes", "area_total",
                "matching_metric"]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_snapshot(path: Path, times: np.ndarray, snap: FieldSnapshot) -> None:
    n = len(times)
    rho33 = snap.rho33_line if snap.rho33_line is not None else np.zeros(n)
    dark = snap.dark_pop_line if snap.dark_pop_line is not None else np.zeros(n)
    rows = zip(times, snap.omega_a.real, snap.omega_a.imag,
               snap.omega_b.real, snap.omega_b.imag, rho33, dark)
    _write_csv(path, SNAPSHOT_COLUMNS, rows)


def read_snapshot(path: Path) -> tuple[np.ndarray, FieldSnapshot]:
    data = np.genfromtxt(path, delimiter=",", names=True)
    t = np.atleast_1d(data["t"])
    omega_a = np.atleast_1d(data["omega_a_re"]) + 1j * np.atleast_1d(data["omega_a_im"])
    omega_b = np.atleast_1d(data["omega_b_re"]) + 1j * np.atleast_1d(data["omega_b_im"])
    snap = FieldSnapshot(z=0.0, omega_a=omega_a, omega_b=omega_b,
                         rho33_line=np.atleast_1d(data["rho33"]),
                         dark_pop_line=np.atleast_1d(data["rho_dd"]))
    return t, snap


def write_areas(path: Path, records, metrics) -> None:
    rows = [(r.z, r.a_a, r.a_b, r.a_total, m) for r, m in zip(records, metrics)]
    _write_csv(path, AREA_COLUMNS, rows)


def write_manifest(directory: Path, *, mode: str, label: str, config: dict,
                   derived: dict, snapshots: list[dict], failed: bool = False,
                   failure_reason: str | None = None) -> None:
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "mode": mode,
        "label": label,
        "config": config,
        "derived": derived,
        "snapshots": snapshots,
        "failed": failed,
        "failure_reason": failure_reason,
    }
    with open(directory / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_manifest(directory: Path) -> dict:
    with open(Path(directory) / "manifest.json") as fh:
        manifest = json.load(fh)
    if manifest.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(
            f"unsupported manifest schema {manifest.get('schema_version')}")
    return manifest


def write_trajectory(directory: Path, trajectory: Trajectory, *, mode: str,
                     config: dict, area_records=None, metrics=None) -> None:
    """Persist a trajectory with its manifest (and optional area table)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    times = trajectory.times()
    entries = []
    for i, snap in enumerate(trajectory.snapshots):
        name = f"snapshot_{i:04d}.csv"
        write_snapshot(directory / name, times, snap)
        entries.append({"index": i, "z": snap.z, "file": name})
    scenario = trajectory.scenario
    derived = {
        "zeta": scenario.prep.zeta,
        "cos_theta": scenario.prep.cos_theta,
        "sin_theta": scenario.prep.sin_theta,
        "kappa": trajectory.kappa,
        "alpha_d": trajectory.alpha_d,
        "mu": scenario.mu,
        "tau": scenario.tau,
        "dt": scenario.grid.dt,
        "dz": scenario.grid.dz,
        "n_nodes": scenario.ensemble.n_nodes,
    }
    if area_records is not None:
        write_areas(directory / "areas.csv", area_records,
                    metrics if metrics is not None else [0.0] * len(area_records))
    write_manifest(directory, mode=mode, label=scenario.label, config=config,
                   derived=derived, snapshots=entries, failed=trajectory.failed,
                   failure_reason=trajectory.failure_reason)


def read_trajectory(directory: Path) -> Trajectory:
    """Rebuild a trajectory (fields and observables) from a run directory."""
    directory = Path(directory)
    manifest = read_manifest(directory)
    cfg = manifest["config"]
    derived = manifest["derived"]
    prep = make_medium_preparation(cfg["preparation"]["alpha_sq"],
                                   1.0 - cfg["preparation"]["alpha_sq"],
                                   cfg["preparation"]["lambda"],
                                   cfg["preparation"].get("phi", 0.0))
    ensemble = make_detuning_ensemble(cfg["medium"]["t2_star"],
                                      cfg["medium"]["n_nodes"],
                                      cfg["medium"].get("rule", "auto"))
    snaps = []
    times = None
    for entry in manifest["snapshots"]:
        t, snap = read_snapshot(directory / entry["file"])
        times = t
        snaps.append(FieldSnapshot(z=entry["z"], omega_a=snap.omega_a,
                                   omega_b=snap.omega_b,
                                   rho33_line=snap.rho33_line,
                                   dark_pop_line=snap.dark_pop_line))
    if times is None:
        raise ValueError(f"no snapshots recorded in {directory}")
    grid = Grid(t_min=float(times[0]), t_max=float(times[-1]), n_t=len(times),
                z_min=manifest["snapshots"][0]["z"],
                z_max=max(manifest["snapshots"][-1]["z"],
                          manifest["snapshots"][0]["z"] + derived["dz"]),
                n_z=max(len(snaps) - 1, 2))
    scenario = Scenario(grid=grid, prep=prep, ensemble=ensemble,
                        mu=derived["mu"], tau=derived["tau"],
                        input_omega_a=snaps[0].omega_a,
                        input_omega_b=snaps[0].omega_b,
                        label=manifest.get("label", ""),
                        enforce_input_window=False)
    return Trajectory(scenario=scenario, snapshots=snaps,
                      kappa=derived["kappa"], alpha_d=derived["alpha_d"],
                      failed=manifest.get("failed", False),
                      failure_reason=manifest.get("failure_reason"))
