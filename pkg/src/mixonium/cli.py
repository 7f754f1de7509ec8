"""Command-line front end: scenario configuration, input-pulse synthesis,
batch execution and persistence.

Subcommands
-----------
``simulate <config>``
    Integrate the full field/matter system and write the trajectory.
``analytic <config>``
    Tabulate the closed-form solutions on a depth/time grid (same file
    schema, flagged ``mode = "analytic"`` in the manifest).
``areas <run dir>``
    Recompute the per-depth area table of a stored trajectory.
``fit <run dir> --observable vg|beer``
    Fit group velocity or weak-pulse decay on a stored trajectory.
``sweep <config> --vary key=start:stop:step``
    Run one scenario per swept value, concurrently, each into its own
    subdirectory, plus a summary table.

Exit codes: 0 success, 1 configuration error, 2 numerical abort.

Configuration files are TOML; all quantities are dimensionless in the
internal unit system (c = 1, times in units of T2*).  See the README for
the key reference.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import os
import sys
from pathlib import Path

import numpy as np
from scipy.special import gamma as gamma_function

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import analytic, diagnostics, storage
from .core import (Grid, make_detuning_ensemble, make_medium_preparation)
from .dressed import dark_population_profile
from .propagator import Scenario, propagate

__all__ = [
    "PulseSpec",
    "ConfigError",
    "synth_input",
    "resolve_mu_for_velocity",
    "load_config",
    "build_scenario",
    "run",
    "analytic_export",
    "main",
]

OUTPUT_ROOT_ENV = "MIXONIUM_OUTPUT_ROOT"
_GAMMA_QUARTER = float(gamma_function(0.25))
_WINDOW_LIMIT = 1e-8


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


# =============================================================================
# Pulse synthesis
# =============================================================================

from dataclasses import dataclass


@dataclass(frozen=True)
class PulseSpec:
    """One input pulse: shape, signed area (radians), width and center."""

    shape: str
    area: float
    width: float
    offset: float = 0.0
    target: str = "pump"

    def __post_init__(self):
        if self.shape not in ("gaussian", "supergaussian", "sech"):
            raise ConfigError(f"unknown pulse shape {self.shape!r}")
        if self.width <= 0:
            raise ConfigError("pulse width must be positive")
        if self.target not in ("pump", "stokes"):
            raise ConfigError(f"pulse target must be pump or stokes, "
                              f"got {self.target!r}")


def synth_input(spec: PulseSpec, grid: Grid) -> np.ndarray:
    """Sample a normalized input envelope on the time grid.

    Prefactors make the numerical area equal ``spec.area`` exactly:
    gaussian ``A/(w sqrt(2 pi))``, flat-topped quartic ("supergaussian")
    ``A/(w Gamma(1/4))`` and sech ``A/(pi w)``.
    """
    t = grid.times() - spec.offset
    w = spec.width
    if spec.shape == "gaussian":
        env = spec.area / (w * np.sqrt(2 * np.pi)) * np.exp(-t**2 / (2 * w**2))
    elif spec.shape == "supergaussian":
        env = spec.area / (w * _GAMMA_QUARTER) * np.exp(-t**4 / (2 * w)**4)
    else:
        env = spec.area / (np.pi * w) / np.cosh(t / w)
    peak = np.max(np.abs(env))
    if peak > 0 and max(abs(env[0]), abs(env[-1])) > _WINDOW_LIMIT * peak:
        raise ConfigError(
            f"time window too narrow for pulse {spec.target} "
            f"(offset {spec.offset}, width {w})")
    return env.astype(complex)


def resolve_mu_for_velocity(target_vg: float, tau: float, zeta: float,
                            ensemble) -> float:
    """Coupling constant giving input-regime group velocity
    ``v_g/c = (1 + zeta kappa tau)^{-1} = target_vg``.

    Uses the linearity of the absorption scale in the coupling.
    """
    if not 0.0 < target_vg < 1.0:
        raise ConfigError(f"target v_g/c = {target_vg} is unreachable "
                          "(need 0 < target < 1)")
    kappa_tau = (1.0 / target_vg - 1.0) / zeta
    response = float(np.dot(ensemble.weights,
                            1.0 / (1.0 + (ensemble.deltas * tau) ** 2)))
    return kappa_tau / tau / (tau / 2.0 * response)


# =============================================================================
# Configuration handling
# =============================================================================

def load_config(path: str | Path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from exc


def _section(cfg: dict, name: str) -> dict:
    if name not in cfg or not isinstance(cfg[name], dict):
        raise ConfigError(f"missing [{name}] section")
    return cfg[name]


def _pulse_specs(cfg: dict) -> list[PulseSpec]:
    pulses = cfg.get("pulse", [])
    if not pulses:
        raise ConfigError("at least one [[pulse]] block is required")
    specs = []
    for block in pulses:
        if "area_pi" in block:
            area = float(block["area_pi"]) * np.pi
        elif "area" in block:
            area = float(block["area"])
        else:
            raise ConfigError("pulse needs area_pi or area")
        specs.append(PulseSpec(shape=block.get("shape", "gaussian"),
                               area=area, width=float(block["width"]),
                               offset=float(block.get("offset", 0.0)),
                               target=block.get("target", "pump")))
    targets = [s.target for s in specs]
    if len(targets) != len(set(targets)):
        raise ConfigError("each pulse target may appear only once")
    return specs


def _resolved_config(cfg: dict, mu: float, grid: Grid) -> dict:
    """Echo of the configuration with every derived choice pinned, as
    stored in the manifest; re-running it reproduces the outputs."""
    prep = _section(cfg, "preparation")
    med = _section(cfg, "medium")
    out = {
        "preparation": {"alpha_sq": float(prep["alpha_sq"]),
                        "lambda": float(prep["lambda"]),
                        "phi": float(prep.get("phi", 0.0))},
        "medium": {"t2_star": float(med.get("t2_star", 1.0)),
                   "n_nodes": int(med.get("n_nodes", 41)),
                   "rule": med.get("rule", "auto"),
                   "mu": mu},
        "grid": {"t_min": grid.t_min, "t_max": grid.t_max, "n_t": grid.n_t,
                 "z_min": grid.z_min, "z_max": grid.z_max, "n_z": grid.n_z},
        "pulse": cfg.get("pulse", []),
        "analytic": cfg.get("analytic", {}),
        "output": {"snapshot_stride": int(cfg.get("output", {})
                                          .get("snapshot_stride", 25))},
        "label": cfg.get("label", ""),
    }
    return out


def _build_common(cfg: dict):
    prep_cfg = _section(cfg, "preparation")
    med = _section(cfg, "medium")
    try:
        alpha_sq = float(prep_cfg["alpha_sq"])
        lam = float(prep_cfg["lambda"])
    except KeyError as exc:
        raise ConfigError(f"preparation needs {exc.args[0]}") from exc
    try:
        prep = make_medium_preparation(alpha_sq, 1.0 - alpha_sq, lam,
                                       float(prep_cfg.get("phi", 0.0)))
        ensemble = make_detuning_ensemble(float(med.get("t2_star", 1.0)),
                                          int(med.get("n_nodes", 41)),
                                          med.get("rule", "auto"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return prep, ensemble


def build_scenario(cfg: dict) -> tuple[Scenario, dict]:
    """Resolve a simulate-mode configuration into a runnable scenario."""
    prep, ensemble = _build_common(cfg)
    med = _section(cfg, "medium")
    specs = _pulse_specs(cfg)
    widths = {s.target: s.width for s in specs}
    tau = widths.get("pump", specs[0].width)

    if ("mu" in med) == ("target_vg" in med):
        raise ConfigError("medium needs exactly one of mu / target_vg")
    if "mu" in med:
        mu = float(med["mu"])
        if mu < 0:
            raise ConfigError("mu must be nonnegative")
    else:
        mu = resolve_mu_for_velocity(float(med["target_vg"]), tau,
                                     prep.zeta, ensemble)

    from .core import kappa as kappa_of
    kap = kappa_of(mu, tau, ensemble)

    gcfg = cfg.get("grid", {})
    n_t = int(gcfg.get("n_t", 2048))
    if "t_min" in gcfg and "t_max" in gcfg:
        t_min, t_max = float(gcfg["t_min"]), float(gcfg["t_max"])
    else:
        pad = float(gcfg.get("t_pad", 20.0))
        wmax = max(s.width for s in specs)
        t_min = min(s.offset for s in specs) - pad * wmax
        t_max = max(s.offset for s in specs) + pad * wmax

    z_min = float(gcfg.get("z_min", 0.0))
    if "length_beer" in gcfg:
        from .core import beer_coefficient
        alpha_d = beer_coefficient(mu, ensemble.t2_star)
        if alpha_d <= 0:
            raise ConfigError("length_beer needs mu > 0")
        z_max = z_min + float(gcfg["length_beer"]) / alpha_d
    elif "kz_span" in gcfg:
        if kap <= 0:
            raise ConfigError("kz_span needs mu > 0")
        z_max = z_min + float(gcfg["kz_span"]) / kap
    elif "z_max" in gcfg:
        z_max = float(gcfg["z_max"])
    else:
        raise ConfigError("grid needs one of length_beer / kz_span / z_max")

    if "n_z" in gcfg:
        n_z = int(gcfg["n_z"])
    else:
        dz_kappa = float(gcfg.get("dz_kappa", 0.01))
        if kap <= 0:
            raise ConfigError("automatic n_z needs mu > 0; give n_z explicitly")
        n_z = max(2, int(math.ceil((z_max - z_min) * kap / dz_kappa)))

    grid = Grid(t_min=t_min, t_max=t_max, n_t=n_t,
                z_min=z_min, z_max=z_max, n_z=n_z)
    omega_a = np.zeros(n_t, dtype=complex)
    omega_b = np.zeros(n_t, dtype=complex)
    for spec in specs:
        env = synth_input(spec, grid)
        if spec.target == "pump":
            omega_a = omega_a + env
        else:
            omega_b = omega_b + env
    stride = int(cfg.get("output", {}).get("snapshot_stride", 25))
    scenario = Scenario(grid=grid, prep=prep, ensemble=ensemble, mu=mu,
                        tau=tau, input_omega_a=omega_a, input_omega_b=omega_b,
                        snapshot_stride=stride, label=cfg.get("label", ""))
    try:
        scenario.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return scenario, _resolved_config(cfg, mu, grid)


def _output_dir(cfg: dict, override: str | None) -> Path:
    directory = override or cfg.get("output", {}).get("directory")
    if directory is None:
        raise ConfigError("no output directory (config [output] or --out)")
    root = os.environ.get(OUTPUT_ROOT_ENV)
    path = Path(directory)
    if root and not path.is_absolute():
        path = Path(root) / path
    return path


# =============================================================================
# Commands
# =============================================================================

def run(cfg: dict, out_dir: str | None = None) -> int:
    """Simulate-mode execution: propagate and persist."""
    scenario, resolved = build_scenario(cfg)
    directory = _output_dir(cfg, out_dir)
    trajectory = propagate(scenario)
    records = diagnostics.areas_over_z(trajectory)
    dt = scenario.grid.dt
    metrics = [diagnostics.matching_metric(s.omega_a, s.omega_b, dt,
                                           scenario.tau)
               for s in trajectory.snapshots]
    storage.write_trajectory(directory, trajectory, mode="simulate",
                             config=resolved, area_records=records,
                             metrics=metrics)
    if trajectory.failed:
        print(f"ABORTED: {trajectory.failure_reason}", file=sys.stderr)
        return 2
    print(f"wrote {len(trajectory.snapshots)} snapshots to {directory}")
    return 0


def analytic_export(cfg: dict, out_dir: str | None = None) -> int:
    """Tabulate the closed-form solutions over a depth/time grid."""
    prep, ensemble = _build_common(cfg)
    acfg = _section(cfg, "analytic")
    med = _section(cfg, "medium")
    try:
        tau = float(acfg["tau"])
        kz_min = float(acfg["kz_min"])
        kz_max = float(acfg["kz_max"])
        n_frames = int(acfg.get("n_frames", 6))
    except KeyError as exc:
        raise ConfigError(f"analytic section needs {exc.args[0]}") from exc
    mu = float(med.get("mu", 1.0))
    from .core import kappa as kappa_of
    kap = kappa_of(mu, tau, ensemble)
    if kap <= 0:
        raise ConfigError("analytic export needs mu > 0")
    params = analytic.AnalyticParams(tau=tau, kappa=kap, prep=prep, mu=mu)

    gcfg = cfg.get("grid", {})
    n_t = int(gcfg.get("n_t", 2048))
    pad = float(gcfg.get("t_pad", 12.0))
    t_min = float(gcfg.get("t_min", tau * kz_min - pad * tau))
    t_max = float(gcfg.get("t_max", tau * kz_max + pad * tau))
    grid = Grid(t_min=t_min, t_max=t_max, n_t=n_t,
                z_min=kz_min / kap, z_max=kz_max / kap,
                n_z=max(n_frames - 1, 2))
    times = grid.times()
    zs = np.linspace(grid.z_min, grid.z_max, n_frames)

    from .propagator import FieldSnapshot, Trajectory
    snaps = []
    for z in zs:
        omega_a, omega_b = analytic.mixonium_pulses(params, z, times)
        rho = analytic.mixonium_density_matrix(params, 0.0, z, times)
        dark, _ = dark_population_profile(rho, omega_a, omega_b)
        snaps.append(FieldSnapshot(
            z=float(z), omega_a=omega_a.astype(complex),
            omega_b=omega_b.astype(complex),
            rho33_line=rho[..., 2, 2].real, dark_pop_line=dark))
    scenario = Scenario(grid=grid, prep=prep, ensemble=ensemble, mu=mu,
                        tau=tau, input_omega_a=snaps[0].omega_a,
                        input_omega_b=snaps[0].omega_b,
                        label=cfg.get("label", ""),
                        enforce_input_window=False)
    trajectory = Trajectory(scenario=scenario, snapshots=snaps, kappa=kap,
                            alpha_d=scenario.alpha_d)
    records = diagnostics.areas_over_z(trajectory)
    metrics = [diagnostics.matching_metric(s.omega_a, s.omega_b, grid.dt, tau)
               for s in snaps]
    directory = _output_dir(cfg, out_dir)
    storage.write_trajectory(directory, trajectory, mode="analytic",
                             config=_resolved_config(cfg, mu, grid),
                             area_records=records, metrics=metrics)
    print(f"wrote {len(snaps)} analytic frames to {directory}")
    return 0


def cmd_areas(directory: str) -> int:
    trajectory = storage.read_trajectory(Path(directory))
    records = diagnostics.areas_over_z(trajectory)
    dt = trajectory.scenario.grid.dt
    metrics = [diagnostics.matching_metric(s.omega_a, s.omega_b, dt,
                                           trajectory.scenario.tau)
               for s in trajectory.snapshots]
    storage.write_areas(Path(directory) / "areas.csv", records, metrics)
    for rec in records:
        print(f"z={rec.z:12.6g}  A_a={rec.a_a / np.pi:8.4f} pi  "
              f"A_b={rec.a_b / np.pi:8.4f} pi  A_T={rec.a_total / np.pi:8.4f} pi")
    return 0


def cmd_fit(directory: str, observable: str, which: str) -> int:
    trajectory = storage.read_trajectory(Path(directory))
    result: dict[str, object] = {"observable": observable}
    if observable == "vg":
        vg = diagnostics.group_velocity_fit(trajectory, which=which)
        result.update({"which": which, "vg_over_c": vg})
        print(f"fitted v_g/c = {vg:.6f}")
    elif observable == "beer":
        alpha_fit = diagnostics.beer_decay_fit(trajectory)
        result.update({"alpha_fit": alpha_fit,
                       "alpha_d": trajectory.alpha_d,
                       "relative_error":
                           abs(alpha_fit - trajectory.alpha_d) / trajectory.alpha_d})
        print(f"fitted decay {alpha_fit:.6f} vs alpha_d {trajectory.alpha_d:.6f}")
    else:
        raise ConfigError(f"unknown observable {observable!r}")
    with open(Path(directory) / "fits.json", "w") as fh:
        json.dump(result, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def _parse_vary(vary: str):
    try:
        key, _, rng = vary.partition("=")
        start, stop, step = (float(v) for v in rng.split(":"))
    except ValueError as exc:
        raise ConfigError(f"bad --vary syntax {vary!r}, "
                          "expected key=start:stop:step") from exc
    n = int(round((stop - start) / step)) + 1
    return key, [start + i * step for i in range(n)]


def _sweep_one(cfg: dict, key: str, value: float, directory: Path,
               mode: str, summary_only: bool):
    cfg = json.loads(json.dumps(cfg))  # deep copy of plain data
    section, _, leaf = key.partition(".")
    if not leaf:
        section, leaf = "preparation", key
    cfg.setdefault(section, {})[leaf] = value
    cfg.setdefault("output", {})["directory"] = str(directory)
    prep, ensemble = _build_common(cfg)
    row = {"value": value, "zeta": prep.zeta, "cos_theta": prep.cos_theta,
           "sin_theta": prep.sin_theta}
    if not summary_only:
        status = (analytic_export(cfg) if mode == "analytic" else run(cfg))
        row["status"] = status
    return row


def cmd_sweep(cfg: dict, vary: str, out_dir: str | None, mode: str,
              summary_only: bool, max_workers: int | None) -> int:
    key, values = _parse_vary(vary)
    base = _output_dir(cfg, out_dir)
    base.mkdir(parents=True, exist_ok=True)
    leaf = key.split(".")[-1]
    rows = []
    if summary_only:
        for v in values:
            rows.append(_sweep_one(cfg, key, v, base / f"{leaf}_{v:g}",
                                   mode, True))
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=max_workers) as pool:
            futures = [pool.submit(_sweep_one, cfg, key, v,
                                   base / f"{leaf}_{v:g}", mode, False)
                       for v in values]
            rows = [f.result() for f in futures]
    rows.sort(key=lambda r: r["value"])
    with open(base / "summary.csv", "w") as fh:
        fh.write(f"{leaf},zeta,cos_theta,sin_theta\n")
        for row in rows:
            fh.write(",".join(format(row[k], ".17g") for k in
                              ("value", "zeta", "cos_theta", "sin_theta")) + "\n")
    bad = [r for r in rows if r.get("status", 0) != 0]
    print(f"sweep over {leaf}: {len(rows)} scenarios, {len(bad)} failed")
    return 2 if bad else 0


# =============================================================================
# Entry point
# =============================================================================

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mixonium",
        description="Two-pulse propagation in partially coherent "
                    "three-level media")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="integrate the full system")
    p_sim.add_argument("config")
    p_sim.add_argument("--out", default=None, help="output directory override")

    p_an = sub.add_parser("analytic", help="tabulate closed-form solutions")
    p_an.add_argument("config")
    p_an.add_argument("--out", default=None)

    p_ar = sub.add_parser("areas", help="recompute the area table")
    p_ar.add_argument("directory")

    p_fit = sub.add_parser("fit", help="fit an observable on a trajectory")
    p_fit.add_argument("directory")
    p_fit.add_argument("--observable", choices=("vg", "beer"), required=True)
    p_fit.add_argument("--which", choices=("a", "b", "total"), default="total")

    p_sw = sub.add_parser("sweep", help="run a family of scenarios")
    p_sw.add_argument("config")
    p_sw.add_argument("--vary", required=True, metavar="key=start:stop:step")
    p_sw.add_argument("--out", default=None)
    p_sw.add_argument("--mode", choices=("simulate", "analytic"),
                      default="simulate")
    p_sw.add_argument("--summary-only", action="store_true",
                      help="write only the summary table (no trajectories)")
    p_sw.add_argument("--workers", type=int, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return run(load_config(args.config), args.out)
        if args.command == "analytic":
            return analytic_export(load_config(args.config), args.out)
        if args.command == "areas":
            return cmd_areas(args.directory)
        if args.command == "fit":
            return cmd_fit(args.directory, args.observable, args.which)
        if args.command == "sweep":
            return cmd_sweep(load_config(args.config), args.vary, args.out,
                             args.mode, args.summary_only, args.workers)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
