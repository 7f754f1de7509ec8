"""Bright/dark dressed basis: projections, dark Rabi frequency and the
two-level reduction for temporally matched pulses."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._stencils import envelope_midpoints

__all__ = [
    "DressedAmplitudes",
    "DegenerateFieldError",
    "total_rabi",
    "dark_rabi",
    "bright_dark_amplitudes",
    "dark_population",
    "dark_population_profile",
    "bare_hamiltonian",
    "dressed_hamiltonian",
    "two_level_reference",
]

#: Relative floor below which the dressed basis is treated as undefined.
EPS_FLOOR_REL = 1e-12


class DegenerateFieldError(ValueError):
    """Both fields vanish, the bright/dark basis is undefined."""


@dataclass(frozen=True)
class DressedAmplitudes:
    c_b: complex
    c_d: complex
    omega_t: float


def total_rabi(omega_a, omega_b):
    """Total Rabi frequency sqrt(|omega_a|^2 + |omega_b|^2)."""
    return np.sqrt(np.abs(omega_a) ** 2 + np.abs(omega_b) ** 2)


def dark_rabi(omega_a: np.ndarray, omega_b: np.ndarray, dt: float) -> np.ndarray:
    """Dark Rabi frequency ``(2i/Omega_T^2)(Omega_a dOmega_b/dT -
    Omega_b dOmega_a/dT)`` for real unchirped envelopes.

    Derivatives use central differences in the interior and one-sided
    differences at the ends.  Where the total Rabi frequency is below the
    floor the value is defined as zero.  Raises for complex input, for
    which the dark Rabi frequency is not defined here.
    """
    omega_a = np.asarray(omega_a)
    omega_b = np.asarray(omega_b)
    for arr in (omega_a, omega_b):
        if np.iscomplexobj(arr) and np.max(np.abs(arr.imag)) > 1e-12 * max(np.max(np.abs(arr)), 1e-300):
            raise ValueError("dark_rabi requires real unchirped envelopes")
    oa = omega_a.real.astype(float)
    ob = omega_b.real.astype(float)
    da = np.gradient(oa, dt)
    db = np.gradient(ob, dt)
    omega_t_sq = oa**2 + ob**2
    floor = EPS_FLOOR_REL * np.max(omega_t_sq)
    out = np.zeros(len(oa), dtype=complex)
    mask = omega_t_sq > floor
    out[mask] = 2j * (oa[mask] * db[mask] - ob[mask] * da[mask]) / omega_t_sq[mask]
    return out


def bright_dark_amplitudes(c1: complex, c2: complex, omega_a: complex,
                           omega_b: complex) -> DressedAmplitudes:
    """Project bare ground-state amplitudes onto the bright/dark pair:
    ``c_B = (Omega_a^* c1 + Omega_b^* c2)/Omega_T`` and
    ``c_D = (Omega_b c1 - Omega_a c2)/Omega_T``."""
    omega_t = float(total_rabi(omega_a, omega_b))
    if omega_t <= EPS_FLOOR_REL * max(abs(c1), abs(c2), 1.0):
        raise DegenerateFieldError("fields vanish, dressed basis undefined")
    c_b = (np.conj(omega_a) * c1 + np.conj(omega_b) * c2) / omega_t
    c_d = (omega_b * c1 - omega_a * c2) / omega_t
    return DressedAmplitudes(c_b=complex(c_b), c_d=complex(c_d), omega_t=omega_t)


def dark_population(rho: np.ndarray, omega_a: complex, omega_b: complex) -> float:
    """Dark-state population <D|rho|D> for a (possibly mixed) state.

    For a pure state this reduces to |c_D|^2 of the amplitude projection.
    """
    omega_t = float(total_rabi(omega_a, omega_b))
    if omega_t <= 0.0:
        raise DegenerateFieldError("fields vanish, dressed basis undefined")
    # |D> = (Omega_b^* |1> - Omega_a^* |2>)/Omega_T
    d1 = np.conj(omega_b) / omega_t
    d2 = -np.conj(omega_a) / omega_t
    val = (np.conj(d1) * d1 * rho[0, 0] + np.conj(d2) * d2 * rho[1, 1]
           + np.conj(d1) * d2 * rho[0, 1] + np.conj(d2) * d1 * rho[1, 0])
    return float(val.real)


def dark_population_profile(rhos: np.ndarray, omega_a: np.ndarray,
                            omega_b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized dark population along a series.

    Returns ``(values, valid)``: where the total Rabi frequency falls
    below the relative floor the basis is undefined, the value reported
    as 0 and the mask entry False.
    """
    omega_t_sq = np.abs(omega_a) ** 2 + np.abs(omega_b) ** 2
    floor = EPS_FLOOR_REL * np.max(omega_t_sq)
    valid = omega_t_sq > floor
    d1 = np.where(valid, np.conj(omega_b), 0.0)
    d2 = np.where(valid, -np.conj(omega_a), 0.0)
    val = (np.abs(d1) ** 2 * rhos[..., 0, 0].real
           + np.abs(d2) ** 2 * rhos[..., 1, 1].real
           + 2.0 * (np.conj(d1) * d2 * rhos[..., 0, 1]).real)
    out = np.zeros_like(val)
    out[valid] = val[valid] / omega_t_sq[valid]
    return out, valid


def bare_hamiltonian(omega_a: complex, omega_b: complex, delta: float) -> np.ndarray:
    """Rotating-frame Hamiltonian (units hbar = 1) in the bare basis."""
    return np.array([
        [0.0, 0.0, -omega_a / 2.0],
        [0.0, 0.0, -omega_b / 2.0],
        [-np.conj(omega_a) / 2.0, -np.conj(omega_b) / 2.0, delta],
    ], dtype=complex)


def dressed_hamiltonian(omega_a: complex, omega_b: complex, delta: float) -> np.ndarray:
    """Hamiltonian assembled in the bright/dark form and expressed back in
    the bare basis: coupling of strength Omega_T/2 between |B> and |3>
    only.  Identical to the bare construction for any field pair."""
    omega_t = total_rabi(omega_a, omega_b)
    h = np.zeros((3, 3), dtype=complex)
    h[2, 2] = delta
    if omega_t == 0.0:
        return h
    bright = np.array([omega_a, omega_b, 0.0], dtype=complex) / omega_t
    ket3 = np.array([0.0, 0.0, 1.0], dtype=complex)
    h -= (omega_t / 2.0) * np.outer(bright, ket3)
    h -= (omega_t / 2.0) * np.outer(ket3, np.conj(bright))
    return h


def two_level_reference(omega_t: np.ndarray, delta: float, dt: float):
    """RK4 integration of the matched-pulse two-level reduction.

    ``dc_B/dT = i (Omega_T/2) c3`` and ``dc3/dT = i (Omega_T/2) c_B -
    i Delta c3`` with initial condition c_B = 1, c3 = 0.  Envelope values
    at half steps are interpolated with the shared midpoint stencil.

    Returns the (c_B, c3) series on the same grid.
    """
    omega_t = np.asarray(omega_t, dtype=complex)
    if dt <= 0:
        raise ValueError("dt must be positive")
    n = len(omega_t)
    c_b = np.empty(n, dtype=complex)
    c3 = np.empty(n, dtype=complex)
    c_b[0], c3[0] = 1.0, 0.0
    half = envelope_midpoints(omega_t)

    def rhs(cb, c3_, om):
        return 0.5j * om * c3_, 0.5j * om * cb - 1j * delta * c3_

    for j in range(n - 1):
        w0, wh, w1 = omega_t[j], half[j], omega_t[j + 1]
        k1b, k13 = rhs(c_b[j], c3[j], w0)
        k2b, k23 = rhs(c_b[j] + 0.5 * dt * k1b, c3[j] + 0.5 * dt * k13, wh)
        k3b, k33 = rhs(c_b[j] + 0.5 * dt * k2b, c3[j] + 0.5 * dt * k23, wh)
        k4b, k43 = rhs(c_b[j] + dt * k3b, c3[j] + dt * k33, w1)
        c_b[j + 1] = c_b[j] + dt / 6.0 * (k1b + 2 * k2b + 2 * k3b + k4b)
        c3[j + 1] = c3[j] + dt / 6.0 * (k13 + 2 * k23 + 2 * k33 + k43)
    return c_b, c3
