"""Two-pulse propagation in three-level lambda media prepared with
partial ground-state phase coherence: closed-form solutions, a
Maxwell-Bloch simulator and the diagnostics connecting them."""

from .core import (
    DetuningEnsemble,
    Grid,
    MediumParams,
    MediumPreparation,
    beer_coefficient,
    initial_density_matrix,
    kappa,
    make_detuning_ensemble,
    make_medium_preparation,
    rotation_matrix,
)
from .analytic import (
    AnalyticParams,
    analytic_pulse_areas,
    asymptotic_pulses,
    diagonal_density_matrix,
    diagonal_pulses,
    excited_state_probability,
    mixonium_density_matrix,
    mixonium_pulses,
    pure_state_amplitudes,
)
from .dressed import (
    DressedAmplitudes,
    bright_dark_amplitudes,
    dark_population,
    dark_rabi,
    dressed_hamiltonian,
    total_rabi,
    two_level_reference,
)
from .propagator import (
    FieldSnapshot,
    PropagationAbort,
    Scenario,
    Trajectory,
    bloch_integrate,
    maxwell_step,
    polarization_average,
    propagate,
    seed_with_analytic,
)
from .diagnostics import (
    AreaRecord,
    area_theorem_residual,
    beer_decay_fit,
    group_velocity_fit,
    matching_metric,
    pulse_area,
    regime_classify,
    total_area,
)

__version__ = "0.1.0"
