"""Marching integration of the coupled field/matter system in retarded
coordinates (T = t - x/c, Z = x/c).

Per depth step the atomic density matrices are integrated along T with
fixed-step RK4 independently for every detuning node, the two optical
coherences are ensemble-averaged, and the fields advance with a Heun
predictor/corrector in Z.  Atoms at every depth start in the prepared
state at the left edge of the (validated) time window.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from ._kernels import bloch_rk4_ensemble, bloch_rk4_single
from ._stencils import envelope_midpoints
from .analytic import AnalyticParams, mixonium_pulses
from .core import DetuningEnsemble, Grid, MediumPreparation, beer_coefficient, initial_density_matrix, kappa
from .dressed import dark_population_profile

__all__ = [
    "FieldSnapshot",
    "Scenario",
    "Trajectory",
    "PropagationAbort",
    "bloch_integrate",
    "polarization_average",
    "maxwell_step",
    "propagate",
    "seed_with_analytic",
]

TRACE_DRIFT_LIMIT = 1e-6
WINDOW_EDGE_LIMIT = 1e-6       # runtime snapshot guard, relative to peak
INPUT_EDGE_LIMIT = 1e-8        # scenario validation guard
RABI_STEP_GUARD = 0.1          # max mu*dz*|<rho13>| before halving dz
_MAX_HALVINGS = 12


class PropagationAbort(RuntimeError):
    """Numerical instability detected; carries a diagnostic message."""


# =============================================================================
# Data containers
# =============================================================================

@dataclass(frozen=True)
class FieldSnapshot:
    """Complex envelopes over the time grid at one propagation depth,
    with the line-center atomic observables evaluated for these fields."""

    z: float
    omega_a: np.ndarray
    omega_b: np.ndarray
    rho33_line: np.ndarray | None = None
    dark_pop_line: np.ndarray | None = None

    def peak_total_rabi(self) -> float:
        return float(np.max(np.sqrt(np.abs(self.omega_a) ** 2
                                    + np.abs(self.omega_b) ** 2)))


@dataclass(frozen=True)
class Scenario:
    """Complete configuration of one propagation run."""

    grid: Grid
    prep: MediumPreparation
    ensemble: DetuningEnsemble
    mu: float
    tau: float
    input_omega_a: np.ndarray
    input_omega_b: np.ndarray
    snapshot_stride: int = 25
    label: str = ""
    enforce_input_window: bool = True

    def validate(self) -> None:
        n_t = self.grid.n_t
        if len(self.input_omega_a) != n_t or len(self.input_omega_b) != n_t:
            raise ValueError("input envelopes must match the time grid")
        if self.mu < 0 or self.tau <= 0:
            raise ValueError("mu must be >= 0 and tau > 0")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")
        peak = max(np.max(np.abs(self.input_omega_a)),
                   np.max(np.abs(self.input_omega_b)))
        if peak == 0.0:
            return
        if self.enforce_input_window:
            edge = max(abs(self.input_omega_a[0]), abs(self.input_omega_a[-1]),
                       abs(self.input_omega_b[0]), abs(self.input_omega_b[-1]))
            if edge > INPUT_EDGE_LIMIT * peak:
                raise ValueError(
                    f"time window too narrow: edge/peak = {edge / peak:.2e} "
                    f"exceeds {INPUT_EDGE_LIMIT:.0e}")

    @property
    def kappa(self) -> float:
        return kappa(self.mu, self.tau, self.ensemble)

    @property
    def alpha_d(self) -> float:
        return beer_coefficient(self.mu, self.ensemble.t2_star)


@dataclass
class Trajectory:
    """Ordered snapshots of one run plus the derived medium constants."""

    scenario: Scenario
    snapshots: list[FieldSnapshot] = field(default_factory=list)
    kappa: float = 0.0
    alpha_d: float = 0.0
    failed: bool = False
    failure_reason: str | None = None
    window_violations: list[float] = field(default_factory=list)

    def depths(self) -> np.ndarray:
        return np.array([s.z for s in self.snapshots])

    def times(self) -> np.ndarray:
        return self.scenario.grid.times()


# =============================================================================
# Elementary operations
# =============================================================================

def _midpoints(series: np.ndarray) -> np.ndarray:
    return envelope_midpoints(series)


def bloch_integrate(initial_rho: np.ndarray, omega_a: np.ndarray,
                    omega_b: np.ndarray, delta: float, dt: float) -> np.ndarray:
    """RK4 march of a single atom driven by sampled envelopes.

    Returns the full density-matrix series, shape (n_t, 3, 3).  Aborts
    with a diagnostic if the trace drifts by more than 1e-6.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    rho0 = np.asarray(initial_rho, dtype=complex)
    if rho0.shape != (3, 3):
        raise ValueError("initial_rho must be 3x3")
    oa = np.ascontiguousarray(omega_a, dtype=complex)
    ob = np.ascontiguousarray(omega_b, dtype=complex)
    if len(oa) != len(ob):
        raise ValueError("envelope series must have equal length")
    rho = bloch_rk4_single(rho0, oa, ob, _midpoints(oa), _midpoints(ob),
                           float(delta), float(dt))
    drift = np.abs(np.trace(rho[-1]) - 1.0)
    if drift > TRACE_DRIFT_LIMIT:
        raise PropagationAbort(
            f"trace drifted by {drift:.2e} (> {TRACE_DRIFT_LIMIT:.0e}); "
            f"reduce dt (currently {dt:.3e})")
    return rho


def polarization_average(atom_states_at_t: np.ndarray,
                         ensemble: DetuningEnsemble):
    """Ensemble-averaged optical coherences <rho13>, <rho23>.

    ``atom_states_at_t`` holds one density matrix per detuning node in
    axis 0 (any extra trailing sample axes before the 3x3 block).
    """
    states = np.asarray(atom_states_at_t)
    if states.shape[0] != ensemble.n_nodes:
        raise ValueError(
            f"got {states.shape[0]} node states for {ensemble.n_nodes} nodes")
    p13 = ensemble.average(states[..., 0, 2])
    p23 = ensemble.average(states[..., 1, 2])
    return p13, p23


@dataclass(frozen=True)
class EnsembleResponse:
    """Bloch response of the whole ensemble to one field configuration."""

    p13_nodes: np.ndarray
    p23_nodes: np.ndarray
    rho_line: np.ndarray
    trace_err: float

    def averaged(self, ensemble: DetuningEnsemble):
        return ensemble.average(self.p13_nodes), ensemble.average(self.p23_nodes)


def ensemble_response(rho0: np.ndarray, omega_a: np.ndarray, omega_b: np.ndarray,
                      ensemble: DetuningEnsemble, dt: float) -> EnsembleResponse:
    """Integrate every detuning node over the full time window."""
    oa = np.ascontiguousarray(omega_a, dtype=complex)
    ob = np.ascontiguousarray(omega_b, dtype=complex)
    p13, p23, rho_line, terr = bloch_rk4_ensemble(
        np.asarray(rho0, dtype=complex), oa, ob, _midpoints(oa), _midpoints(ob),
        ensemble.deltas, float(dt), ensemble.line_center_index)
    return EnsembleResponse(p13_nodes=p13, p23_nodes=p23, rho_line=rho_line,
                            trace_err=float(terr.max()))


def maxwell_step(omega_a: np.ndarray, omega_b: np.ndarray,
                 atoms: EnsembleResponse, ensemble: DetuningEnsemble,
                 mu: float, dz: float, *, rho0: np.ndarray, dt: float):
    """Heun advance of the fields by one depth step.

    ``atoms`` must be the ensemble response to the *current* fields.  The
    predictor uses its averaged polarization, the atoms are re-integrated
    with the predicted fields, and the corrector averages the two slopes.
    Returns the advanced fields and the predictor-step response.
    """
    p13, p23 = atoms.averaged(ensemble)
    oa_pred = omega_a - 1j * mu * p13 * dz
    ob_pred = omega_b - 1j * mu * p23 * dz
    atoms_pred = ensemble_response(rho0, oa_pred, ob_pred, ensemble, dt)
    q13, q23 = atoms_pred.averaged(ensemble)
    omega_a_new = omega_a - 1j * mu * 0.5 * (p13 + q13) * dz
    omega_b_new = omega_b - 1j * mu * 0.5 * (p23 + q23) * dz
    return omega_a_new, omega_b_new, atoms_pred


# =============================================================================
# Trajectory integration
# =============================================================================

def _snapshot(z, omega_a, omega_b, response: EnsembleResponse) -> FieldSnapshot:
    rho33 = response.rho_line[:, 2, 2].real.copy()
    dark, _ = dark_population_profile(response.rho_line, omega_a, omega_b)
    return FieldSnapshot(z=float(z), omega_a=omega_a.copy(), omega_b=omega_b.copy(),
                         rho33_line=rho33, dark_pop_line=dark)


def _window_ok(snapshot: FieldSnapshot) -> bool:
    """Snapshot edge-field check.

    Fields at the window edges above the limit either mean the pulse is
    walking out of the window or that the re-emission tail of residually
    excited atoms has outlived the dephasing horizon of the detuning comb
    (~2 pi / node spacing).  Both are recorded on the trajectory rather
    than aborting: the run remains meaningful near the pulses.
    """
    peak = snapshot.peak_total_rabi()
    if peak == 0.0:
        return True
    edge = max(abs(snapshot.omega_a[0]), abs(snapshot.omega_a[-1]),
               abs(snapshot.omega_b[0]), abs(snapshot.omega_b[-1]))
    return edge <= WINDOW_EDGE_LIMIT * peak


def _advance(omega_a, omega_b, dz, mu, rho0, ensemble, dt, depth=0):
    """One guarded Heun step, recursively halving dz when the per-step
    Rabi rotation exceeds the stability bound."""
    atoms = ensemble_response(rho0, omega_a, omega_b, ensemble, dt)
    if atoms.trace_err > TRACE_DRIFT_LIMIT:
        raise PropagationAbort(
            f"trace drift {atoms.trace_err:.2e} exceeds {TRACE_DRIFT_LIMIT:.0e}")
    p13, p23 = atoms.averaged(ensemble)
    step_rotation = mu * dz * max(np.max(np.abs(p13)), np.max(np.abs(p23)))
    if step_rotation > RABI_STEP_GUARD and depth < _MAX_HALVINGS:
        oa, ob, _ = _advance(omega_a, omega_b, dz / 2, mu, rho0, ensemble, dt,
                             depth + 1)
        oa, ob, _ = _advance(oa, ob, dz / 2, mu, rho0, ensemble, dt, depth + 1)
        return oa, ob, atoms
    oa_new, ob_new, _ = maxwell_step(omega_a, omega_b, atoms, ensemble, mu, dz,
                                     rho0=rho0, dt=dt)
    return oa_new, ob_new, atoms


def propagate(scenario: Scenario) -> Trajectory:
    """March the scenario from z_min to z_max, collecting snapshots at the
    configured stride.  On numerical abort the partial trajectory is
    returned with the failure marker set."""
    scenario.validate()
    grid = scenario.grid
    dt = grid.dt
    dz = grid.dz
    rho0 = initial_density_matrix(scenario.prep)
    traj = Trajectory(scenario=scenario, kappa=scenario.kappa,
                      alpha_d=scenario.alpha_d)
    omega_a = np.asarray(scenario.input_omega_a, dtype=complex).copy()
    omega_b = np.asarray(scenario.input_omega_b, dtype=complex).copy()
    z = grid.z_min
    try:
        for step in range(grid.n_z):
            omega_a_new, omega_b_new, atoms = _advance(
                omega_a, omega_b, dz, scenario.mu, rho0, scenario.ensemble, dt)
            if step % scenario.snapshot_stride == 0:
                snap = _snapshot(z, omega_a, omega_b, atoms)
                if not _window_ok(snap):
                    traj.window_violations.append(snap.z)
                traj.snapshots.append(snap)
            omega_a, omega_b = omega_a_new, omega_b_new
            z = grid.z_min + (step + 1) * dz
        final_atoms = ensemble_response(rho0, omega_a, omega_b,
                                        scenario.ensemble, dt)
        snap = _snapshot(z, omega_a, omega_b, final_atoms)
        if not _window_ok(snap):
            traj.window_violations.append(snap.z)
        traj.snapshots.append(snap)
    except PropagationAbort as exc:
        traj.failed = True
        traj.failure_reason = str(exc)
    if traj.window_violations:
        warnings.warn(
            f"edge fields above {WINDOW_EDGE_LIMIT:.0e} of peak at "
            f"{len(traj.window_violations)} snapshot(s) (first at "
            f"z = {traj.window_violations[0]:.4g}); widen the window or "
            "refine the detuning ensemble", stacklevel=2)
    return traj


def seed_with_analytic(scenario: Scenario, params: AnalyticParams,
                       z0: float) -> Scenario:
    """Scenario whose inflow boundary carries the closed-form envelopes
    evaluated at depth ``z0``; the depth window is shifted to start there.

    Warns when ``-kappa*z0 < 4``: the seed is then contaminated by
    non-asymptotic structure.
    """
    if -params.kappa * z0 < 4.0:
        warnings.warn(
            f"seed depth kappa*z0 = {params.kappa * z0:.2f} is shallow; "
            "input-regime asymptotics are contaminated", stacklevel=2)
    times = scenario.grid.times()
    omega_a, omega_b = mixonium_pulses(params, z0, times)
    span = scenario.grid.z_max - scenario.grid.z_min
    grid = replace(scenario.grid, z_min=z0, z_max=z0 + span)
    return replace(scenario, grid=grid, prep=params.prep,
                   input_omega_a=omega_a.astype(complex),
                   input_omega_b=omega_b.astype(complex))
