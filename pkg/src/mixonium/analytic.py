"""Closed-form two-pulse and density-matrix solutions.

The solutions for a medium prepared in the diagonal (rotated) state are
built from five auxiliary functions sharing a common denominator
``D(Z, T) = 2 cosh(T/tau - zeta kappa Z) + exp(T/tau + (3 zeta - 2) kappa Z)``.
Solutions for the partially coherent medium follow by the ground-state
rotation that diagonalizes the initial density matrix.

Every exponential is evaluated after factoring out the largest exponent
(log-domain rescaling), so the expressions stay finite for arbitrarily
large ``|T|`` and ``|Z|``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MediumPreparation, rotation_matrix

__all__ = [
    "AnalyticParams",
    "diagonal_pulses",
    "diagonal_density_matrix",
    "mixonium_pulses",
    "mixonium_density_matrix",
    "excited_state_probability",
    "pure_state_amplitudes",
    "asymptotic_pulses",
    "analytic_pulse_areas",
    "pulse_peak_time",
]


@dataclass(frozen=True)
class AnalyticParams:
    """Inputs of the closed-form solutions.

    ``kappa`` must be the inverse absorption length computed from the same
    detuning ensemble that any consumer integrates over; ``mu`` is kept
    only for residual checks against the propagation equations.
    """

    tau: float
    kappa: float
    prep: MediumPreparation
    mu: float = 0.0

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")


def _log_denominator(zeta, kz, t_over_tau):
    """log D with D = e^x + e^-x + e^y, x = T/tau - zeta kZ, y = x + 2g."""
    x = t_over_tau - zeta * kz
    y = t_over_tau + (3.0 * zeta - 2.0) * kz
    m = np.maximum(np.maximum(x, -x), y)
    return m + np.log(np.exp(x - m) + np.exp(-x - m) + np.exp(y - m))


def _f_functions(zeta, kz, t_over_tau):
    x = t_over_tau - zeta * kz
    y = t_over_tau + (3.0 * zeta - 2.0) * kz
    w = t_over_tau - (1.0 - zeta) * kz
    g = (2.0 * zeta - 1.0) * kz
    log_d = _log_denominator(zeta, kz, t_over_tau)
    f11 = np.exp(x - log_d) - np.exp(-x - log_d) - np.exp(y - log_d)
    f22 = -np.exp(x - log_d) - np.exp(-x - log_d) + np.exp(y - log_d)
    # |f12| <= 1 and |f23| <= 1 hold identically; clip the exponents at 0
    # to keep float round-off from tripping exp overflow warnings.
    f12 = 2.0 * np.exp(np.minimum(w - log_d, 0.0))
    f13 = 2.0j * np.exp(-log_d)
    f23 = 2.0j * np.exp(np.minimum(g - log_d, 0.0))
    return f11, f22, f12, f13, f23


# =============================================================================
# Diagonal-state solutions
# =============================================================================

def diagonal_pulses(params: AnalyticParams, z, t):
    """Pump/Stokes envelopes for a medium prepared in the rotated
    (diagonal) ground state.  Broadcasts over array ``z`` and ``t``."""
    zeta = params.prep.zeta
    kz = params.kappa * np.asarray(z, dtype=float)
    tt = np.asarray(t, dtype=float) / params.tau
    kz, tt = np.broadcast_arrays(kz, tt)
    omega_a = (4.0 / params.tau) * np.exp(-_log_denominator(zeta, kz, tt))
    # The Stokes denominator is the pump one mirrored through
    # zeta -> 1 - zeta in the drift and the sign of the exponential term.
    w = tt - (1.0 - zeta) * kz
    y = tt + (1.0 - 3.0 * zeta) * kz
    m = np.maximum(np.maximum(w, -w), y)
    log_db = m + np.log(np.exp(w - m) + np.exp(-w - m) + np.exp(y - m))
    omega_b = (4.0 / params.tau) * np.exp(-log_db)
    return omega_a, omega_b


def diagonal_density_matrix(params: AnalyticParams, delta, z, t) -> np.ndarray:
    """Density matrix (leading axes broadcast of ``delta``, ``z``, ``t``,
    trailing 3x3) for the diagonal preparation at one detuning."""
    zeta = params.prep.zeta
    kz = params.kappa * np.asarray(z, dtype=float)
    tt = np.asarray(t, dtype=float) / params.tau
    dt_ = np.asarray(delta, dtype=float) * params.tau
    kz, tt, dt_ = np.broadcast_arrays(kz, tt, dt_)
    f11, f22, f12, f13, f23 = _f_functions(zeta, kz, tt)
    norm = 1.0 + dt_**2
    z1, z2 = zeta, 1.0 - zeta
    rho = np.zeros(np.shape(kz) + (3, 3), dtype=complex)
    rho[..., 0, 0] = (z1 * (np.abs(f11)**2 + dt_**2) + z2 * np.abs(f12)**2) / norm
    rho[..., 1, 1] = (z1 * np.abs(f12)**2 + z2 * (np.abs(f22)**2 + dt_**2)) / norm
    rho[..., 2, 2] = (z1 * np.abs(f13)**2 + z2 * np.abs(f23)**2) / norm
    r12 = (z1 * (f11 - 1j * dt_) * f12 + z2 * (f22 + 1j * dt_) * f12) / norm
    r13 = (z1 * (f11 - 1j * dt_) * f13 + z2 * f12 * f23) / norm
    r23 = (z1 * np.conj(f12) * f13 + z2 * (f22 - 1j * dt_) * f23) / norm
    rho[..., 0, 1] = r12
    rho[..., 1, 0] = np.conj(r12)
    rho[..., 0, 2] = r13
    rho[..., 2, 0] = np.conj(r13)
    rho[..., 1, 2] = r23
    rho[..., 2, 1] = np.conj(r23)
    return rho


# =============================================================================
# Partially coherent (rotated) solutions
# =============================================================================

def mixonium_pulses(params: AnalyticParams, z, t,
                    column_phases: tuple[float, float] = (0.0, 0.0)):
    """Pump/Stokes envelopes for the partially coherent preparation:
    the 2x2 ground-state rotation applied to the diagonal solutions."""
    omega_a_d, omega_b_d = diagonal_pulses(params, z, t)
    s = rotation_matrix(params.prep, column_phases)
    omega_a = s[0, 0] * omega_a_d + s[0, 1] * omega_b_d
    omega_b = s[1, 0] * omega_a_d + s[1, 1] * omega_b_d
    return omega_a, omega_b


def mixonium_density_matrix(params: AnalyticParams, delta, z, t,
                            column_phases: tuple[float, float] = (0.0, 0.0)) -> np.ndarray:
    """Density matrix for the partially coherent preparation,
    ``S rho_d S^dag``.  Trace and eigenvalues {zeta, 1-zeta, 0} are
    preserved at every point."""
    rho_d = diagonal_density_matrix(params, delta, z, t)
    s = rotation_matrix(params.prep, column_phases)
    return np.einsum("ij,...jk,lk->...il", s, rho_d, np.conj(s))


def excited_state_probability(params: AnalyticParams, z, t):
    """Line-center excited-state population in closed form.

    Equals entry (3,3) of the mixed-state density matrix at zero detuning:
    ``4 [zeta + (1-zeta) e^{2(2 zeta - 1) kappa Z}] / D^2``.
    """
    zeta = params.prep.zeta
    kz = params.kappa * np.asarray(z, dtype=float)
    tt = np.asarray(t, dtype=float) / params.tau
    kz, tt = np.broadcast_arrays(kz, tt)
    log_d = _log_denominator(zeta, kz, tt)
    g = 2.0 * (2.0 * zeta - 1.0) * kz
    return (4.0 * zeta * np.exp(-2.0 * log_d)
            + 4.0 * (1.0 - zeta) * np.exp(np.minimum(g - 2.0 * log_d, 0.0)))


def pure_state_amplitudes(params: AnalyticParams, z, t):
    """Line-center probability amplitudes (c1, c2, c3) for a pure-state
    preparation (lam = 1, phi = 0).

    The global phase is fixed by the real f-function convention, which
    makes c1 -> -alpha as T -> +infinity deep in the output regime.
    """
    prep = params.prep
    if abs(prep.lam - 1.0) > 1e-12:
        raise ValueError("probability amplitudes exist only for lam = 1")
    zeta = prep.zeta
    kz = params.kappa * np.asarray(z, dtype=float)
    tt = np.asarray(t, dtype=float) / params.tau
    kz, tt = np.broadcast_arrays(kz, tt)
    f11, _, f12, f13, _ = _f_functions(zeta, kz, tt)
    c1 = prep.alpha * f11 - prep.beta * f12
    c2 = prep.beta * f11 + prep.alpha * f12
    c3 = np.conj(f13)
    return c1, c2, c3


def asymptotic_pulses(params: AnalyticParams, z, t, regime: str):
    """Matched hyperbolic-secant simulton forms valid deep in the input
    (``-kappa Z >> 1``) or output (``kappa Z >> 1``) regime.

    The regime tag is explicit so either expansion can be probed anywhere.
    """
    prep = params.prep
    zeta = prep.zeta
    kz = params.kappa * np.asarray(z, dtype=float)
    tt = np.asarray(t, dtype=float) / params.tau
    kz, tt = np.broadcast_arrays(kz, tt)
    if regime == "input":
        shape = (2.0 / params.tau) / np.cosh(tt - zeta * kz)
        return prep.cos_theta * shape, -prep.sin_theta * shape
    if regime == "output":
        shape = (2.0 / params.tau) / np.cosh(tt - (1.0 - zeta) * kz)
        return prep.sin_theta * shape, prep.cos_theta * shape
    raise ValueError(f"regime must be 'input' or 'output', got {regime!r}")


def analytic_pulse_areas(params: AnalyticParams, z):
    """Signed pulse areas (A_a, A_b, A_total) at depth ``z``.

    ``A_a = 2 pi (cos_theta / h(Z) + sin_theta / h(-Z))`` with
    ``h(Z) = sqrt(1 + e^{2(2 zeta - 1) kappa Z})``; the total area is
    exactly 2 pi at every depth.
    """
    prep = params.prep
    kz = params.kappa * np.asarray(z, dtype=float)
    g = 2.0 * (2.0 * prep.zeta - 1.0) * kz
    # 1/h(Z) = e^{-log(1+e^g)/2}, evaluated through log1p of the
    # non-growing branch.
    inv_h_plus = np.exp(-0.5 * (np.maximum(g, 0.0) + np.log1p(np.exp(-np.abs(g)))))
    inv_h_minus = np.exp(-0.5 * (np.maximum(-g, 0.0) + np.log1p(np.exp(-np.abs(g)))))
    area_a = 2.0 * np.pi * (prep.cos_theta * inv_h_plus + prep.sin_theta * inv_h_minus)
    area_b = 2.0 * np.pi * (-prep.sin_theta * inv_h_plus + prep.cos_theta * inv_h_minus)
    total = np.sqrt(area_a**2 + area_b**2)
    return area_a, area_b, total


def pulse_peak_time(params: AnalyticParams, z):
    """Common peak time of the matched analytic envelopes at depth ``z``:
    ``T/tau = zeta kappa Z - log(1 + e^{2(2 zeta - 1) kappa Z}) / 2``."""
    prep = params.prep
    kz = params.kappa * np.asarray(z, dtype=float)
    g = 2.0 * (2.0 * prep.zeta - 1.0) * kz
    log_term = np.maximum(g, 0.0) + np.log1p(np.exp(-np.abs(g)))
    return params.tau * (prep.zeta * kz - 0.5 * log_term)
