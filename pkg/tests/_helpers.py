"""Shared oracle machinery for the test suite.

The PDE residual check differentiates the closed-form solutions with
central differences and substitutes them into the coupled equations of
motion; it is independent of how the solutions are evaluated internally.
"""

import numpy as np

from mixonium.analytic import AnalyticParams, mixonium_density_matrix, mixonium_pulses
from mixonium.core import Grid, kappa, make_detuning_ensemble, make_medium_preparation
from mixonium.dressed import dark_population_profile
from mixonium.propagator import FieldSnapshot, Scenario, Trajectory


def make_params(alpha_sq=0.8, lam=1.0, phi=0.0, tau=3.0, mu=1.0, n_nodes=41,
                t2_star=1.0):
    prep = make_medium_preparation(alpha_sq, 1.0 - alpha_sq, lam, phi)
    ensemble = make_detuning_ensemble(t2_star, n_nodes)
    params = AnalyticParams(tau=tau, kappa=kappa(mu, tau, ensemble),
                            prep=prep, mu=mu)
    return params, ensemble


def analytic_trajectory(params, ensemble, kz_values, t_min=None, t_max=None,
                        n_t=2048):
    """Trajectory whose snapshots tabulate the closed-form solutions."""
    tau = params.tau
    kz_values = np.asarray(kz_values, dtype=float)
    if params.kappa > 0:
        zs = kz_values / params.kappa
    else:
        zs = kz_values
    # 18 tau of margin keeps the truncated sech tails below 1e-6 of the
    # 2 pi area at every sampled depth
    if t_min is None:
        t_min = tau * min(kz_values.min(), 0.0) - 18 * tau
    if t_max is None:
        t_max = tau * max(kz_values.max(), 0.0) + 18 * tau
    grid = Grid(t_min=t_min, t_max=t_max, n_t=n_t,
                z_min=float(zs[0]), z_max=float(zs[-1]) + 1e-9, n_z=max(len(zs) - 1, 2))
    times = grid.times()
    snaps = []
    for z in zs:
        omega_a, omega_b = mixonium_pulses(params, z, times)
        rho = mixonium_density_matrix(params, 0.0, z, times)
        dark, _ = dark_population_profile(rho, omega_a, omega_b)
        snaps.append(FieldSnapshot(z=float(z), omega_a=omega_a.astype(complex),
                                   omega_b=omega_b.astype(complex),
                                   rho33_line=rho[..., 2, 2].real,
                                   dark_pop_line=dark))
    scenario = Scenario(grid=grid, prep=params.prep, ensemble=ensemble,
                        mu=params.mu, tau=tau,
                        input_omega_a=snaps[0].omega_a,
                        input_omega_b=snaps[0].omega_b,
                        enforce_input_window=False)
    return Trajectory(scenario=scenario, snapshots=snaps, kappa=params.kappa,
                      alpha_d=scenario.alpha_d)


def bare_hamiltonian_stack(omega_a, omega_b, delta):
    """Vectorized rotating-frame Hamiltonian, trailing 3x3 axes."""
    omega_a, omega_b, delta = np.broadcast_arrays(omega_a, omega_b, delta)
    h = np.zeros(omega_a.shape + (3, 3), dtype=complex)
    h[..., 0, 2] = -omega_a / 2.0
    h[..., 2, 0] = -np.conj(omega_a) / 2.0
    h[..., 1, 2] = -omega_b / 2.0
    h[..., 2, 1] = -np.conj(omega_b) / 2.0
    h[..., 2, 2] = delta
    return h


def residual_norm(params, ensemble, h_frac, kz_extent=1.5, n_z=13, n_t=41,
                  t_extent=6.0):
    """Max-norm of the equation-of-motion residuals of the closed forms.

    Central differences with time step ``h_frac * tau`` and the matching
    depth step ``h_frac / kappa``; the polarization source terms use the
    same detuning quadrature that fixed the absorption scale.  Returns the
    max of the (dimensionless) field-equation and matter-equation
    residuals over the sample grid.
    """
    tau = params.tau
    kap = params.kappa
    h_t = tau * h_frac
    h_z = h_frac / kap
    zs = np.linspace(-kz_extent / kap, kz_extent / kap, n_z)[:, None]
    ts = np.linspace(-t_extent * tau, t_extent * tau, n_t)[None, :]

    # field equations: dOmega/dZ = -i mu <rho_13>, <rho_23>
    oa_p, ob_p = mixonium_pulses(params, zs + h_z, ts)
    oa_m, ob_m = mixonium_pulses(params, zs - h_z, ts)
    d_a = (oa_p - oa_m) / (2 * h_z)
    d_b = (ob_p - ob_m) / (2 * h_z)
    deltas = ensemble.deltas[:, None, None]
    rho = mixonium_density_matrix(params, deltas, zs[None], ts[None])
    p13 = ensemble.average(rho[..., 0, 2])
    p23 = ensemble.average(rho[..., 1, 2])
    maxwell = max(np.max(np.abs(d_a + 1j * params.mu * p13)),
                  np.max(np.abs(d_b + 1j * params.mu * p23))) * tau**2

    # matter equations: drho/dT = -i [H, rho] at every node
    rho_p = mixonium_density_matrix(params, deltas, zs[None], ts[None] + h_t)
    rho_m = mixonium_density_matrix(params, deltas, zs[None], ts[None] - h_t)
    d_rho = (rho_p - rho_m) / (2 * h_t)
    oa, ob = mixonium_pulses(params, zs, ts)
    ham = bare_hamiltonian_stack(oa[None], ob[None], deltas)
    comm = ham @ rho - rho @ ham
    bloch = np.max(np.abs(d_rho + 1j * comm)) * tau
    return max(maxwell, bloch)
