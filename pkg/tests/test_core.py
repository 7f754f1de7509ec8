"""Preparation machinery, detuning quadrature and derived constants."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from mixonium.core import (
    beer_coefficient,
    initial_density_matrix,
    kappa,
    make_detuning_ensemble,
    make_medium_preparation,
    rotation_matrix,
)

# Continuum value of the absorption integral for mu=1, tau=3, T2*=1,
# pinned from adaptive quadrature of the defining integral (see
# test_kappa_matches_adaptive_quadrature, which recomputes it).
KAPPA_TAU3_PINNED = 0.4894776888207518


def ground_block_eig(alpha_sq, lam):
    """Independent oracle: eigensystem of the 2x2 ground-state block."""
    beta_sq = 1.0 - alpha_sq
    coh = lam * np.sqrt(alpha_sq * beta_sq)
    block = np.array([[alpha_sq, coh], [coh, beta_sq]])
    evals, evecs = np.linalg.eigh(block)
    vec = evecs[:, -1]
    if vec[0] < 0:
        vec = -vec
    return evals[-1], vec


class TestMediumPreparation:
    def test_pure_state_closed_form(self):
        prep = make_medium_preparation(0.8, 0.2, 1.0, 0.0)
        assert prep.zeta == pytest.approx(1.0, abs=1e-14)
        assert prep.cos_theta == pytest.approx(np.sqrt(0.8), abs=1e-12)
        assert prep.sin_theta == pytest.approx(-np.sqrt(0.2), abs=1e-12)

    def test_completely_mixed(self):
        prep = make_medium_preparation(0.8, 0.2, 0.0, 0.0)
        assert prep.zeta == pytest.approx(0.8, abs=1e-14)
        assert prep.cos_theta == pytest.approx(1.0)
        assert prep.sin_theta == pytest.approx(0.0)

    def test_partial_coherence_against_eigen_oracle(self):
        zeta_o, vec_o = ground_block_eig(0.8, 0.8)
        prep = make_medium_preparation(0.8, 0.2, 0.8, 0.0)
        assert prep.zeta == pytest.approx(zeta_o, abs=1e-12)
        assert prep.zeta == pytest.approx(0.93863424398922, abs=1e-12)
        assert prep.cos_theta == pytest.approx(vec_o[0], abs=1e-12)
        assert prep.sin_theta == pytest.approx(-vec_o[1], abs=1e-12)
        assert prep.cos_theta == pytest.approx(0.9176, abs=1e-4)
        assert prep.sin_theta == pytest.approx(-0.3976, abs=1e-4)

    def test_degenerate_mixed_state(self):
        prep = make_medium_preparation(0.5, 0.5, 0.0, 0.0)
        assert prep.zeta == pytest.approx(0.5)
        assert (prep.cos_theta, prep.sin_theta) == (1.0, 0.0)

    @pytest.mark.parametrize("bad", [
        dict(alpha_sq=1.2, beta_sq=-0.2, lam=0.5),
        dict(alpha_sq=0.7, beta_sq=0.2, lam=0.5),
        dict(alpha_sq=0.3, beta_sq=0.7, lam=0.5),
        dict(alpha_sq=0.8, beta_sq=0.2, lam=1.5),
        dict(alpha_sq=0.8, beta_sq=0.2, lam=-0.1),
    ])
    def test_rejects_invalid(self, bad):
        with pytest.raises(ValueError):
            make_medium_preparation(bad["alpha_sq"], bad["beta_sq"], bad["lam"])

    @settings(max_examples=200, deadline=None)
    @given(alpha_sq=st.floats(0.5, 1.0), lam=st.floats(0.0, 1.0),
           phi=st.floats(-np.pi, np.pi))
    def test_rotation_diagonalizes(self, alpha_sq, lam, phi):
        prep = make_medium_preparation(alpha_sq, 1.0 - alpha_sq, lam, phi)
        rho0 = initial_density_matrix(prep)
        s = rotation_matrix(prep)
        diag = np.conj(s.T) @ rho0 @ s
        expected = np.diag([prep.zeta, 1.0 - prep.zeta, 0.0])
        assert np.max(np.abs(diag - expected)) < 1e-12
        # type invariants
        assert abs(prep.cos_theta**2 + prep.sin_theta**2 - 1.0) < 1e-12
        assert max(alpha_sq, 0.5) - 1e-12 <= prep.zeta <= 1.0 + 1e-12
        assert np.max(np.abs(rho0 - np.conj(rho0.T))) == 0.0
        assert abs(np.trace(rho0).real - 1.0) < 1e-12
        assert np.linalg.eigvalsh(rho0).min() > -1e-12

    def test_zeta_monotone_and_pure_limit(self):
        lams = np.linspace(0.0, 1.0, 101)
        for alpha_sq in (0.6, 0.7, 0.8, 0.9):
            zetas = [make_medium_preparation(alpha_sq, 1 - alpha_sq, l).zeta
                     for l in lams]
            assert np.all(np.diff(zetas) >= -1e-14)
            assert zetas[-1] == pytest.approx(1.0, abs=1e-12)

    def test_column_phases_keep_diagonalization(self):
        prep = make_medium_preparation(0.7, 0.3, 0.6, 0.4)
        rho0 = initial_density_matrix(prep)
        s = rotation_matrix(prep, column_phases=(0.3, -1.1))
        diag = np.conj(s.T) @ rho0 @ s
        assert np.max(np.abs(diag - np.diag([prep.zeta, 1 - prep.zeta, 0]))) < 1e-12


class TestInitialDensityMatrix:
    def test_single_ground_state(self):
        prep = make_medium_preparation(1.0, 0.0, 0.3, 0.0)
        assert np.allclose(initial_density_matrix(prep), np.diag([1, 0, 0]))

    def test_coherence_magnitude(self):
        prep = make_medium_preparation(0.8, 0.2, 0.8, 0.0)
        rho = initial_density_matrix(prep)
        assert rho[0, 1] == pytest.approx(0.32, abs=1e-14)

    def test_coherence_phase(self):
        prep = make_medium_preparation(0.8, 0.2, 1.0, np.pi)
        rho = initial_density_matrix(prep)
        assert rho[0, 1] == pytest.approx(-0.4, abs=1e-12)


class TestDetuningEnsemble:
    def test_single_node(self):
        ens = make_detuning_ensemble(1.0, 1)
        assert ens.deltas.tolist() == [0.0]
        assert ens.weights.tolist() == [1.0]
        assert ens.line_center_index == 0

    @pytest.mark.parametrize("n", [3, 5, 11, 15, 41, 81])
    @pytest.mark.parametrize("t2", [0.5, 1.0, 2.0])
    def test_weights_normalized_and_symmetric(self, n, t2):
        ens = make_detuning_ensemble(t2, n)
        assert abs(ens.weights.sum() - 1.0) < 1e-12
        assert np.allclose(ens.deltas, -ens.deltas[::-1], atol=1e-12)
        assert np.allclose(ens.weights, ens.weights[::-1], atol=1e-14)
        assert ens.deltas[ens.line_center_index] == 0.0

    def test_three_node_second_moment(self):
        ens = make_detuning_ensemble(1.0, 3)
        assert np.dot(ens.weights, ens.deltas**2) == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("n", [5, 41, 81])
    def test_gaussian_moments_exact(self, n):
        # moments of the normalized Gaussian line of width 1/T2*
        t2 = 1.3
        ens = make_detuning_ensemble(t2, n)
        sigma = 1.0 / t2
        expected = {0: 1.0, 1: 0.0, 2: sigma**2, 3: 0.0, 4: 3 * sigma**4}
        for p, want in expected.items():
            got = np.dot(ens.weights, ens.deltas**p)
            assert got == pytest.approx(want, rel=1e-10, abs=1e-12 * sigma**p)

    @pytest.mark.parametrize("n", [0, 2, 4, 40])
    def test_rejects_bad_counts(self, n):
        with pytest.raises(ValueError):
            make_detuning_ensemble(1.0, n)

    def test_uniform_rule_properties(self):
        ens = make_detuning_ensemble(1.0, 161, rule="uniform")
        spacing = np.diff(ens.deltas)
        assert np.allclose(spacing, spacing[0], rtol=1e-12)
        assert abs(ens.weights.sum() - 1.0) < 1e-12
        for p, want in ((2, 1.0), (4, 3.0)):
            assert np.dot(ens.weights, ens.deltas**p) == pytest.approx(
                want, rel=1e-10)
        assert kappa(1.0, 3.0, ens) == pytest.approx(KAPPA_TAU3_PINNED,
                                                     rel=1e-5)

    def test_rejects_unknown_rule(self):
        with pytest.raises(ValueError):
            make_detuning_ensemble(1.0, 41, rule="chebyshev")


class TestKappa:
    def test_single_node_limit(self):
        ens = make_detuning_ensemble(1.0, 1)
        assert kappa(2.0, 5.0, ens) == pytest.approx(5.0, abs=1e-14)

    def test_long_pulse_reaches_beer_scale(self):
        # narrow-bandwidth limit: 2 kappa -> alpha_d
        ens = make_detuning_ensemble(1.0, 41)
        k = kappa(1.0, 100.0, ens)
        assert 2 * k == pytest.approx(beer_coefficient(1.0, 1.0), rel=0.02)

    def test_kappa_matches_adaptive_quadrature(self):
        tau, t2 = 3.0, 1.0

        def integrand(delta):
            line = t2 / np.sqrt(2 * np.pi) * np.exp(-(t2 * delta) ** 2 / 2)
            return line / (1 + (delta * tau) ** 2)

        oracle, err = quad(integrand, -np.inf, np.inf, epsabs=1e-13,
                           epsrel=1e-12, limit=400)
        oracle *= tau / 2
        assert err < 1e-10
        assert oracle == pytest.approx(KAPPA_TAU3_PINNED, abs=1e-10)
        ens = make_detuning_ensemble(t2, 41)
        assert kappa(1.0, tau, ens) == pytest.approx(KAPPA_TAU3_PINNED, rel=2e-5)

    def test_kappa_below_half_mu_tau(self):
        ens = make_detuning_ensemble(1.0, 41)
        for tau in (0.5, 1.0, 3.0, 10.0):
            assert 0.0 < kappa(1.0, tau, ens) <= tau / 2 + 1e-15


class TestBeerCoefficient:
    def test_unit_values(self):
        assert beer_coefficient(1.0, 1.0) == pytest.approx(np.sqrt(np.pi / 2),
                                                           rel=1e-14)

    def test_zero_coupling(self):
        assert beer_coefficient(0.0, 2.0) == 0.0

    def test_linearity(self):
        assert beer_coefficient(2.0, 3.0) == pytest.approx(
            6 * np.sqrt(np.pi / 2), rel=1e-14)
