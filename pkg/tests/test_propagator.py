"""Numerical field/matter integration: single-atom oracles, conservation
laws, convergence orders and analytic tracking."""

import warnings

import numpy as np
import pytest

from _helpers import make_params
from mixonium.analytic import mixonium_density_matrix, mixonium_pulses
from mixonium.core import Grid, initial_density_matrix, make_detuning_ensemble, make_medium_preparation
from mixonium.propagator import (
    PropagationAbort,
    Scenario,
    bloch_integrate,
    ensemble_response,
    maxwell_step,
    polarization_average,
    propagate,
    seed_with_analytic,
)

TAU = 3.0


def sech_pulse(t, tau=TAU, area=2 * np.pi):
    return area / (np.pi * tau) / np.cosh(t / tau)


class TestBlochIntegrate:
    def test_zero_fields_keep_state(self):
        prep = make_medium_preparation(0.7, 0.3, 0.5, 0.2)
        rho0 = initial_density_matrix(prep)
        zeros = np.zeros(301, dtype=complex)
        rho = bloch_integrate(rho0, zeros, zeros, 0.8, 0.05)
        assert np.max(np.abs(rho - rho0)) < 1e-12

    def test_two_level_transparency_oracle(self):
        # resonant 2 pi sech on the pump transition alone:
        # rho33(T) = sech^2(T/tau) and the ground state fully recovers
        t = np.linspace(-20 * TAU, 20 * TAU, 4001)
        dt = t[1] - t[0]
        omega_a = sech_pulse(t).astype(complex)
        rho0 = np.diag([1.0, 0.0, 0.0]).astype(complex)
        rho = bloch_integrate(rho0, omega_a, np.zeros_like(omega_a), 0.0, dt)
        want = 1.0 / np.cosh(t / TAU) ** 2
        assert np.max(np.abs(rho[:, 2, 2].real - want)) < 1e-7
        assert rho[-1, 0, 0].real == pytest.approx(1.0, abs=1e-7)

    def test_matches_analytic_with_fourth_order_scaling(self):
        # start from the exact state at t_min so the only error is the
        # integrator's own truncation
        params, _ = make_params(alpha_sq=0.8, lam=0.8, n_nodes=41)
        z = -1.0 / params.kappa
        errs = []
        for n in (1001, 2001):
            t = np.linspace(-12 * TAU, 12 * TAU, n)
            dt = t[1] - t[0]
            omega_a, omega_b = mixonium_pulses(params, z, t)
            want = mixonium_density_matrix(params, 0.0, z, t)
            rho = bloch_integrate(want[0], omega_a, omega_b, 0.0, dt)
            errs.append(np.max(np.abs(rho - want)))
        ratio = errs[0] / errs[1]
        assert 8.0 < ratio < 32.0

    def test_detuned_node_matches_analytic(self):
        params, ens = make_params(alpha_sq=0.8, lam=0.2, n_nodes=41)
        delta = ens.deltas[ens.line_center_index + 6]
        z = 0.7 / params.kappa
        t = np.linspace(-12 * TAU, 12 * TAU, 3001)
        omega_a, omega_b = mixonium_pulses(params, z, t)
        want = mixonium_density_matrix(params, delta, z, t)
        rho = bloch_integrate(want[0], omega_a, omega_b, delta, t[1] - t[0])
        assert np.max(np.abs(rho - want)) < 1e-7

    def test_conservation_laws(self):
        prep = make_medium_preparation(0.8, 0.2, 0.6, 0.0)
        rho0 = initial_density_matrix(prep)
        t = np.linspace(-15 * TAU, 15 * TAU, 2001)
        dt = t[1] - t[0]
        omega_a = (1.7 / TAU) * np.exp(-(t / (2 * TAU)) ** 2).astype(complex)
        omega_b = (0.9 / TAU) / np.cosh((t - TAU) / TAU).astype(complex)
        rho = bloch_integrate(rho0, omega_a, omega_b, 0.4, dt)
        traces = np.einsum("tii->t", rho).real
        purity = np.einsum("tij,tji->t", rho, rho).real
        assert np.max(np.abs(traces - 1.0)) < 1e-8
        assert np.max(np.abs(purity - purity[0])) < 1e-6
        assert np.max(np.abs(rho - np.conj(np.swapaxes(rho, 1, 2)))) < 1e-12
        eigs = np.linalg.eigvalsh(rho)
        assert eigs.min() > -1e-8

    def test_instability_detector(self):
        rho0 = np.diag([1.0, 0.0, 0.0]).astype(complex)
        t = np.linspace(-5.0, 5.0, 21)  # absurdly coarse for this drive
        omega = (40.0 * np.exp(-t**2)).astype(complex)
        with pytest.raises(PropagationAbort):
            bloch_integrate(rho0, omega, omega, 0.0, t[1] - t[0])


class TestPolarizationAverage:
    def test_identical_nodes(self):
        ens = make_detuning_ensemble(1.0, 9)
        rho = np.tile(np.arange(9).reshape(3, 3).astype(complex), (9, 1, 1))
        p13, p23 = polarization_average(rho, ens)
        assert p13 == pytest.approx(rho[0, 0, 2])
        assert p23 == pytest.approx(rho[0, 1, 2])

    def test_symmetric_line_gives_real_average(self):
        ens = make_detuning_ensemble(1.0, 21)
        rho = np.zeros((21, 3, 3), dtype=complex)
        even = np.exp(-ens.deltas**2)
        odd = ens.deltas * np.exp(-np.abs(ens.deltas))
        rho[:, 0, 2] = even + 1j * odd
        rho[:, 1, 2] = even + 1j * odd
        p13, _ = polarization_average(rho, ens)
        brute = sum(w * r for w, r in zip(ens.weights[::-1], rho[::-1, 0, 2]))
        assert abs(p13.imag) < 1e-14
        assert p13 == pytest.approx(brute, abs=1e-15)

    def test_single_node(self):
        ens = make_detuning_ensemble(1.0, 1)
        rho = np.arange(9, dtype=complex).reshape(1, 3, 3)
        p13, p23 = polarization_average(rho, ens)
        assert p13 == rho[0, 0, 2] and p23 == rho[0, 1, 2]

    def test_node_count_mismatch(self):
        ens = make_detuning_ensemble(1.0, 5)
        with pytest.raises(ValueError):
            polarization_average(np.zeros((3, 3, 3), dtype=complex), ens)


def small_scenario(mu=0.5, lam=1.0, alpha_sq=0.8, n_nodes=9, kz_span=0.4,
                   n_t=600, matched=True):
    prep = make_medium_preparation(alpha_sq, 1 - alpha_sq, lam)
    ens = make_detuning_ensemble(1.0, n_nodes)
    from mixonium.core import kappa as kappa_of
    kap = kappa_of(mu, TAU, ens) if mu > 0 else 0.05
    n_z = max(int(kz_span / 0.02), 4)
    grid = Grid(t_min=-22 * TAU, t_max=22 * TAU, n_t=n_t,
                z_min=0.0, z_max=kz_span / kap, n_z=n_z)
    t = grid.times()
    if matched:
        base = 2.3 * np.pi / (TAU * np.sqrt(2 * np.pi)) * np.exp(-t**2 / (2 * TAU**2))
        omega_a = prep.alpha * base
        omega_b = prep.beta * base
    else:
        omega_a = 1.2 * np.pi / (TAU * np.sqrt(2 * np.pi)) * np.exp(-t**2 / (2 * TAU**2))
        omega_b = 0.8 * np.pi / (2 * TAU * np.sqrt(2 * np.pi)) * np.exp(-(t - 2 * TAU) ** 2 / (8 * TAU**2))
    return Scenario(grid=grid, prep=prep, ensemble=ens, mu=mu, tau=TAU,
                    input_omega_a=omega_a.astype(complex),
                    input_omega_b=omega_b.astype(complex),
                    snapshot_stride=5)


class TestMaxwellStep:
    def test_zero_coupling_keeps_fields(self):
        scenario = small_scenario(mu=0.0)
        rho0 = initial_density_matrix(scenario.prep)
        dt = scenario.grid.dt
        atoms = ensemble_response(rho0, scenario.input_omega_a,
                                  scenario.input_omega_b, scenario.ensemble, dt)
        omega_a, omega_b, _ = maxwell_step(
            scenario.input_omega_a, scenario.input_omega_b, atoms,
            scenario.ensemble, 0.0, 0.3, rho0=rho0, dt=dt)
        assert np.array_equal(omega_a, scenario.input_omega_a)
        assert np.array_equal(omega_b, scenario.input_omega_b)

    def test_absorbing_step_removes_energy(self):
        scenario = small_scenario(mu=0.5, matched=False)
        rho0 = initial_density_matrix(scenario.prep)
        dt = scenario.grid.dt
        atoms = ensemble_response(rho0, scenario.input_omega_a,
                                  scenario.input_omega_b, scenario.ensemble, dt)
        dz = scenario.grid.dz
        omega_a, _, _ = maxwell_step(
            scenario.input_omega_a, scenario.input_omega_b, atoms,
            scenario.ensemble, scenario.mu, dz, rho0=rho0, dt=dt)
        assert not np.allclose(omega_a, scenario.input_omega_a)


class TestPropagate:
    def test_frame_check_zero_coupling(self):
        trajectory = propagate(small_scenario(mu=0.0))
        assert not trajectory.failed
        first = trajectory.snapshots[0]
        for snap in trajectory.snapshots[1:]:
            assert np.allclose(snap.omega_a, first.omega_a, atol=1e-14)
            assert np.allclose(snap.omega_b, first.omega_b, atol=1e-14)

    def test_matched_pure_inputs_stay_bright(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            trajectory = propagate(small_scenario(mu=0.5, matched=True,
                                                  n_nodes=21))
        assert not trajectory.failed
        for snap in trajectory.snapshots:
            mask = (np.abs(snap.omega_a) ** 2 + np.abs(snap.omega_b) ** 2
                    > 1e-6 * snap.peak_total_rabi() ** 2)
            assert np.max(snap.dark_pop_line[mask]) < 1e-6

    def test_trace_abort_marks_partial_trajectory(self):
        scenario = small_scenario(mu=0.5, n_t=40)  # dt far too coarse
        trajectory = propagate(scenario)
        assert trajectory.failed
        assert "trace" in trajectory.failure_reason.lower()

    def test_edge_violation_recorded_not_fatal(self):
        # few detuning nodes on a long window: the re-emission tail of the
        # residually excited atoms outlives the comb dephasing horizon
        scenario = small_scenario(mu=0.5, matched=True, n_nodes=9,
                                  kz_span=0.4)
        with pytest.warns(UserWarning, match="edge fields"):
            trajectory = propagate(scenario)
        assert not trajectory.failed
        assert trajectory.window_violations

    def test_snapshot_observables_present(self):
        trajectory = propagate(small_scenario(mu=0.5))
        snap = trajectory.snapshots[-1]
        assert snap.rho33_line is not None and len(snap.rho33_line) == 600
        assert snap.dark_pop_line is not None
        assert trajectory.kappa > 0
        assert trajectory.alpha_d == pytest.approx(
            np.sqrt(np.pi / 2) * 0.5, rel=1e-12)


class TestSeededTracking:
    @pytest.fixture(scope="class")
    def seeded(self):
        params, ens = make_params(alpha_sq=0.8, lam=0.8, mu=0.6, n_nodes=21)
        kap = params.kappa
        grid = Grid(t_min=-26 * TAU, t_max=26 * TAU, n_t=1400,
                    z_min=0.0, z_max=1.0 / kap, n_z=100)
        template = Scenario(grid=grid, prep=params.prep, ensemble=ens,
                            mu=params.mu, tau=TAU,
                            input_omega_a=np.zeros(1400, complex),
                            input_omega_b=np.zeros(1400, complex),
                            snapshot_stride=20, enforce_input_window=False)
        scenario = seed_with_analytic(template, params, -6.0 / kap)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            trajectory = propagate(scenario)
        return params, trajectory

    def test_tracks_analytic_fields(self, seeded):
        params, trajectory = seeded
        assert not trajectory.failed
        times = trajectory.times()
        for snap in trajectory.snapshots:
            omega_a, omega_b = mixonium_pulses(params, snap.z, times)
            num = np.linalg.norm(snap.omega_a - omega_a) + np.linalg.norm(
                snap.omega_b - omega_b)
            den = np.linalg.norm(omega_a) + np.linalg.norm(omega_b)
            assert num / den < 5e-3

    def test_halving_dz_is_second_order(self, seeded):
        params, coarse = seeded
        kap = params.kappa
        ens_n = coarse.scenario.ensemble.n_nodes
        errors = {}
        for n_z in (50, 100):
            grid = Grid(t_min=-26 * TAU, t_max=26 * TAU, n_t=1400,
                        z_min=0.0, z_max=1.0 / kap, n_z=n_z)
            template = Scenario(grid=grid, prep=params.prep,
                                ensemble=coarse.scenario.ensemble,
                                mu=params.mu, tau=TAU,
                                input_omega_a=np.zeros(1400, complex),
                                input_omega_b=np.zeros(1400, complex),
                                snapshot_stride=n_z, enforce_input_window=False)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", UserWarning)
                trajectory = propagate(seed_with_analytic(template, params,
                                                          -6.0 / kap))
            snap = trajectory.snapshots[-1]
            omega_a, omega_b = mixonium_pulses(params, snap.z,
                                               trajectory.times())
            errors[n_z] = (np.linalg.norm(snap.omega_a - omega_a)
                           + np.linalg.norm(snap.omega_b - omega_b))
        ratio = errors[50] / errors[100]
        assert 2.5 < ratio < 6.5

    def test_shallow_seed_warns(self, seeded):
        params, trajectory = seeded
        with pytest.warns(UserWarning):
            seed_with_analytic(trajectory.scenario, params,
                               -1.0 / params.kappa)
