"""Pulse areas, matching metrics, area-theorem residuals, velocity and
decay fits, and propagation-regime classification."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from .core import MediumPreparation
from .propagator import FieldSnapshot, Trajectory

__all__ = [
    "AreaRecord",
    "pulse_area",
    "total_area",
    "matching_metric",
    "areas_over_z",
    "area_theorem_residual",
    "peak_time",
    "group_velocity_fit",
    "beer_decay_fit",
    "regime_classify",
    "fit_sech",
]

_COMPLEX_TOL = 1e-9
_SUPPORT_FRACTION = 1e-3
WEAK_AREA_LIMIT = 0.05 * np.pi


@dataclass(frozen=True)
class AreaRecord:
    """Signed pulse areas and the total-envelope area at one depth."""

    z: float
    a_a: float
    a_b: float
    a_total: float


def _require_real(series: np.ndarray, what: str) -> np.ndarray:
    series = np.asarray(series)
    if np.iscomplexobj(series):
        scale = max(float(np.max(np.abs(series))), 1e-300)
        if float(np.max(np.abs(series.imag))) > _COMPLEX_TOL * scale:
            raise ValueError(f"{what} requires a real envelope")
        series = series.real
    return series.astype(float)


def pulse_area(omega: np.ndarray, dt: float) -> float:
    """Signed area of a real envelope (trapezoid over the window)."""
    series = _require_real(omega, "pulse_area")
    return float(np.trapezoid(series, dx=dt))


def total_area(omega_a: np.ndarray, omega_b: np.ndarray, dt: float) -> float:
    """Area of the total Rabi envelope sqrt(|a|^2 + |b|^2)."""
    mag = np.sqrt(np.abs(np.asarray(omega_a)) ** 2
                  + np.abs(np.asarray(omega_b)) ** 2)
    return float(np.trapezoid(mag, dx=dt))


def matching_metric(omega_a: np.ndarray, omega_b: np.ndarray, dt: float,
                    tau: float) -> float:
    """Sup of |d(omega_a/omega_b)/dT| * tau over the pulse support.

    The support mask keeps points with total Rabi frequency above 1e-3 of
    its peak.  Zero means temporally matched envelopes.  The derivative is
    evaluated as (a' b - a b')/b^2, skipping points where the Stokes
    envelope passes through zero inside the mask.
    """
    oa = _require_real(omega_a, "matching_metric")
    ob = _require_real(omega_b, "matching_metric")
    omega_t = np.hypot(oa, ob)
    peak = float(np.max(omega_t))
    if peak == 0.0:
        return 0.0
    mask = omega_t > _SUPPORT_FRACTION * peak
    da = np.gradient(oa, dt)
    db = np.gradient(ob, dt)
    num = np.abs(da * ob - oa * db)
    den = ob**2
    good = mask & (np.abs(ob) > _SUPPORT_FRACTION * peak)
    if not np.any(good):
        good = mask & (np.abs(oa) > _SUPPORT_FRACTION * peak)
        num = np.abs(db * oa - ob * da)
        den = oa**2
    return float(np.max(num[good] / den[good]) * tau)


def areas_over_z(trajectory: Trajectory) -> list[AreaRecord]:
    """Area records for every snapshot of a trajectory."""
    dt = trajectory.scenario.grid.dt
    records = []
    for snap in trajectory.snapshots:
        records.append(AreaRecord(
            z=snap.z,
            a_a=pulse_area(snap.omega_a, dt),
            a_b=pulse_area(snap.omega_b, dt),
            a_total=total_area(snap.omega_a, snap.omega_b, dt)))
    return records


def area_theorem_residual(areas: np.ndarray, alpha_d: float,
                          dz: float) -> np.ndarray:
    """Pointwise residual |dA/dZ + (alpha_d/2) sin A| of the two-level
    area evolution law, central differences in the interior."""
    areas = np.asarray(areas, dtype=float)
    if len(areas) < 3:
        raise ValueError("need at least three area samples")
    dadz = np.gradient(areas, dz)
    return np.abs(dadz + 0.5 * alpha_d * np.sin(areas))


def peak_time(series: np.ndarray, times: np.ndarray) -> float:
    """Peak location of |series|^2 with sub-grid quadratic refinement."""
    mag = np.abs(np.asarray(series)) ** 2
    i = int(np.argmax(mag))
    if i == 0 or i == len(mag) - 1:
        return float(times[i])
    y0, y1, y2 = mag[i - 1], mag[i], mag[i + 1]
    denom = y0 - 2.0 * y1 + y2
    shift = 0.0 if denom == 0 else 0.5 * (y0 - y2) / denom
    return float(times[i] + shift * (times[1] - times[0]))


def group_velocity_fit(trajectory: Trajectory, which: str = "total",
                       z_range: tuple[float, float] | None = None,
                       residual_warn: float = 0.05) -> float:
    """Group velocity (as v_g/c) from a linear fit of peak time vs depth.

    In the retarded frame a slope ``s`` (time per unit depth) converts to
    ``v_g/c = 1/(1+s)``.  Warns when the fit residual suggests the
    snapshots straddle more than one propagation regime.
    """
    times = trajectory.times()
    snaps = trajectory.snapshots
    if z_range is not None:
        lo, hi = z_range
        snaps = [s for s in snaps if lo <= s.z <= hi]
    if len(snaps) < 5:
        raise ValueError("need at least 5 snapshots for a velocity fit")
    zs = np.array([s.z for s in snaps])
    peaks = []
    for snap in snaps:
        if which == "a":
            series = snap.omega_a
        elif which == "b":
            series = snap.omega_b
        elif which == "total":
            series = np.sqrt(np.abs(snap.omega_a) ** 2 + np.abs(snap.omega_b) ** 2)
        else:
            raise ValueError("which must be 'a', 'b' or 'total'")
        peaks.append(peak_time(series, times))
    peaks = np.array(peaks)
    slope, intercept = np.polyfit(zs, peaks, 1)
    resid = peaks - (slope * zs + intercept)
    scale = max(abs(slope) * (zs[-1] - zs[0]), trajectory.scenario.tau)
    if np.max(np.abs(resid)) > residual_warn * scale:
        warnings.warn("peak-position fit residual is large; snapshots may "
                      "straddle propagation regimes", stacklevel=2)
    return float(1.0 / (1.0 + slope))


def beer_decay_fit(trajectory: Trajectory) -> float:
    """Fitted intensity decay constant of a weak single pulse.

    Least-squares slope of log peak intensity against depth; only valid
    for weak inputs (area <= 0.05 pi) spanning at least one Beer length.
    """
    scenario = trajectory.scenario
    dt = scenario.grid.dt
    area_in = abs(pulse_area(np.abs(scenario.input_omega_a)
                             + np.abs(scenario.input_omega_b), dt))
    if area_in > WEAK_AREA_LIMIT:
        raise ValueError(
            f"input area {area_in / np.pi:.3f} pi exceeds the weak-pulse "
            f"limit {WEAK_AREA_LIMIT / np.pi:.2f} pi")
    zs = trajectory.depths()
    peaks = np.array([s.peak_total_rabi() ** 2 for s in trajectory.snapshots])
    if trajectory.alpha_d * (zs[-1] - zs[0]) < 1.0:
        warnings.warn("trajectory spans less than one Beer length; "
                      "decay fit is poorly conditioned", stacklevel=2)
    slope, _ = np.polyfit(zs, np.log(peaks), 1)
    return float(-slope)


def regime_classify(snapshot: FieldSnapshot, prep: MediumPreparation,
                    thresholds: tuple[float, float] = (0.1, 0.9)) -> str:
    """Classify a snapshot as input ('I'), transfer ('II') or output
    ('III') by the peak line-center dark population relative to its
    ceiling (the interaction parameter)."""
    if snapshot.dark_pop_line is None:
        raise ValueError("snapshot carries no line-center dark population")
    lo, hi = thresholds
    peak = float(np.max(snapshot.dark_pop_line))
    if peak < lo * prep.zeta:
        return "I"
    if peak > hi * prep.zeta:
        return "III"
    return "II"


def fit_sech(series: np.ndarray, times: np.ndarray):
    """Least-squares fit of a real envelope to A sech((T - T0)/w).

    Returns ``(amplitude, width, center, rms_residual/|amplitude|)``.
    """
    series = _require_real(series, "fit_sech")
    i = int(np.argmax(np.abs(series)))
    a0 = series[i]
    t0 = times[i]
    w0 = max((times[-1] - times[0]) / 20.0, abs(times[1] - times[0]))

    def model(t, a, w, t0_):
        return a / np.cosh((t - t0_) / w)

    popt, _ = curve_fit(model, times, series, p0=(a0, w0, t0))
    amp, width, center = popt
    resid = series - model(times, *popt)
    return float(amp), float(width), float(center), float(
        np.sqrt(np.mean(resid**2)) / max(abs(amp), 1e-300))
