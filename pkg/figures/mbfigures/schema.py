"""Readers for the trajectory artifact layout written by the simulator CLI.

A run directory contains ``manifest.json`` (resolved configuration plus
derived constants), ``snapshot_NNNN.csv`` series files with columns
``t, omega_a_re, omega_a_im, omega_b_re, omega_b_im, rho33, rho_dd`` and
optionally ``areas.csv`` with columns ``z, area_pump, area_stokes,
area_total, matching_metric``.  Sweep directories carry ``summary.csv``
with a swept-value column followed by ``zeta, cos_theta, sin_theta``.

This package never writes into a run directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1


class SchemaError(RuntimeError):
    """Artifact layout or version not understood."""


@dataclass(frozen=True)
class SnapshotData:
    z: float
    t: np.ndarray
    omega_a: np.ndarray
    omega_b: np.ndarray
    rho33: np.ndarray
    rho_dd: np.ndarray


@dataclass(frozen=True)
class RunData:
    directory: Path
    manifest: dict
    snapshots: list[SnapshotData]

    @property
    def tau(self) -> float:
        return float(self.manifest["derived"]["tau"])

    @property
    def kappa(self) -> float:
        return float(self.manifest["derived"]["kappa"])

    @property
    def alpha_d(self) -> float:
        return float(self.manifest["derived"]["alpha_d"])

    @property
    def label(self) -> str:
        return self.manifest.get("label", "")


def load_manifest(directory: Path) -> dict:
    path = Path(directory) / "manifest.json"
    if not path.exists():
        raise SchemaError(f"no manifest.json in {directory}")
    with open(path) as fh:
        manifest = json.load(fh)
    if manifest.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(
            f"manifest schema {manifest.get('schema_version')!r} in "
            f"{directory}; this reader understands {SCHEMA_VERSION}")
    return manifest


def load_run(directory: Path, frames: list[int] | None = None) -> RunData:
    """Load a run directory, optionally restricted to frame indices."""
    directory = Path(directory)
    manifest = load_manifest(directory)
    entries = manifest["snapshots"]
    if frames is not None:
        missing = [i for i in frames if i < 0 or i >= len(entries)]
        if missing:
            raise SchemaError(f"frames {missing} not in {directory} "
                              f"({len(entries)} snapshots)")
        entries = [entries[i] for i in frames]
    snapshots = []
    for entry in entries:
        path = directory / entry["file"]
        if not path.exists():
            raise SchemaError(f"missing snapshot file {path}")
        data = np.genfromtxt(path, delimiter=",", names=True)
        snapshots.append(SnapshotData(
            z=float(entry["z"]),
            t=np.atleast_1d(data["t"]),
            omega_a=np.atleast_1d(data["omega_a_re"])
            + 1j * np.atleast_1d(data["omega_a_im"]),
            omega_b=np.atleast_1d(data["omega_b_re"])
            + 1j * np.atleast_1d(data["omega_b_im"]),
            rho33=np.atleast_1d(data["rho33"]),
            rho_dd=np.atleast_1d(data["rho_dd"])))
    return RunData(directory=directory, manifest=manifest,
                   snapshots=snapshots)


def load_areas(directory: Path) -> dict[str, np.ndarray]:
    path = Path(directory) / "areas.csv"
    if not path.exists():
        raise SchemaError(f"no areas.csv in {directory}")
    data = np.genfromtxt(path, delimiter=",", names=True)
    return {name: np.atleast_1d(data[name]) for name in data.dtype.names}


def load_summary(directory: Path) -> dict[str, np.ndarray]:
    path = Path(directory) / "summary.csv"
    if not path.exists():
        raise SchemaError(f"no summary.csv in {directory}")
    data = np.genfromtxt(path, delimiter=",", names=True)
    return {name: np.atleast_1d(data[name]) for name in data.dtype.names}
