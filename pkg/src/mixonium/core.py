"""Medium preparation, detuning quadrature and derived propagation constants.

Internal unit system: c = 1, times in units of the inhomogeneous lifetime
T2* (itself a free parameter, default 1), lengths in units of c*T2*.  All
physically meaningful comparisons are made through the dimensionless
products kappa*Z and T/tau, so nothing downstream depends on the choice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "MediumPreparation",
    "DetuningEnsemble",
    "MediumParams",
    "Grid",
    "make_medium_preparation",
    "initial_density_matrix",
    "rotation_matrix",
    "make_detuning_ensemble",
    "kappa",
    "beer_coefficient",
]

_POPULATION_ATOL = 1e-12


# =============================================================================
# Domain types
# =============================================================================

@dataclass(frozen=True)
class MediumPreparation:
    """Partially phase-coherent two-ground-state preparation of the medium.

    ``alpha_sq`` and ``beta_sq`` are the ground-state populations, ``lam``
    the coherence parameter in [0, 1] (0 = completely mixed, 1 = pure
    state) and ``phi`` the coherence phase.  The derived interaction
    parameter ``zeta`` is the larger eigenvalue of the initial density
    matrix; ``cos_theta``/``sin_theta`` are the entries of the rotation
    that diagonalizes it.
    """

    alpha_sq: float
    beta_sq: float
    lam: float
    phi: float
    zeta: float
    cos_theta: float
    sin_theta: float

    @property
    def alpha(self) -> float:
        return float(np.sqrt(self.alpha_sq))

    @property
    def beta(self) -> float:
        return float(np.sqrt(self.beta_sq))

    @property
    def tan_theta(self) -> float:
        return self.sin_theta / self.cos_theta


@dataclass(frozen=True)
class DetuningEnsemble:
    """Discretization of the Gaussian detuning distribution.

    ``deltas`` are the detuning nodes (angular frequency), ``weights`` the
    associated quadrature weights (summing to one), and
    ``line_center_index`` the index of the node at zero detuning.
    """

    t2_star: float
    deltas: np.ndarray
    weights: np.ndarray
    line_center_index: int

    @property
    def n_nodes(self) -> int:
        return len(self.deltas)

    def average(self, values: np.ndarray, axis: int = 0) -> np.ndarray:
        """Weighted ensemble average along the node axis."""
        w = self.weights.reshape([-1 if a == axis else 1
                                  for a in range(np.ndim(values))])
        return np.sum(w * values, axis=axis)


@dataclass(frozen=True)
class MediumParams:
    """Coupling constant and the absorption scales derived from it."""

    mu: float
    t2_star: float = 1.0

    @property
    def alpha_d(self) -> float:
        """Weak-pulse intensity attenuation coefficient (inverse length)."""
        return beer_coefficient(self.mu, self.t2_star)


@dataclass(frozen=True)
class Grid:
    """Uniform retarded-time window and propagation-depth window.

    ``n_t`` counts time samples; ``n_z`` counts propagation *steps*, so the
    depth samples are ``z_min + k*dz`` for ``k = 0..n_z``.
    """

    t_min: float
    t_max: float
    n_t: int
    z_min: float
    z_max: float
    n_z: int

    def __post_init__(self):
        if self.n_t < 2 or self.n_z < 2:
            raise ValueError("grid needs n_t >= 2 and n_z >= 2")
        if not (self.t_max > self.t_min and self.z_max > self.z_min):
            raise ValueError("grid windows must have positive extent")

    @property
    def dt(self) -> float:
        return (self.t_max - self.t_min) / (self.n_t - 1)

    @property
    def dz(self) -> float:
        return (self.z_max - self.z_min) / self.n_z

    def times(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.n_t)

    def depths(self) -> np.ndarray:
        return self.z_min + self.dz * np.arange(self.n_z + 1)


# =============================================================================
# Preparation machinery
# =============================================================================

def make_medium_preparation(alpha_sq: float, beta_sq: float, lam: float,
                            phi: float = 0.0) -> MediumPreparation:
    """Build a validated preparation with its derived rotation data.

    The interaction parameter is
    ``zeta = (1 + sqrt(1 - 4(1-lam^2) alpha_sq beta_sq)) / 2`` and the
    rotation entries are ``cos_theta = (zeta - beta^2)/r`` and
    ``sin_theta = -lam*alpha*beta/r`` with ``r`` the normalization.

    Raises ``ValueError`` for populations outside [0, 1], a non-unit
    population sum, ``alpha_sq < beta_sq`` or ``lam`` outside [0, 1].
    """
    for name, val in (("alpha_sq", alpha_sq), ("beta_sq", beta_sq)):
        if not 0.0 <= val <= 1.0:
            raise ValueError(f"{name}={val} outside [0, 1]")
    if abs(alpha_sq + beta_sq - 1.0) > _POPULATION_ATOL:
        raise ValueError(
            f"populations must sum to 1, got {alpha_sq + beta_sq}")
    if alpha_sq < beta_sq:
        raise ValueError("convention requires alpha_sq >= beta_sq")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lam={lam} outside [0, 1]")

    alpha = np.sqrt(alpha_sq)
    beta = np.sqrt(beta_sq)
    # The discriminant 1 - 4(1-lam^2) a^2 b^2 equals
    # (a^2 - b^2)^2 + (2 lam a b)^2, which does not cancel near the
    # degenerate point a^2 = b^2 = 1/2.
    gap = alpha_sq - beta_sq
    disc = np.hypot(gap, 2.0 * lam * alpha * beta)
    zeta = 0.5 * (1.0 + disc)
    zeta_minus_beta_sq = 0.5 * (gap + disc)
    norm = np.hypot(zeta_minus_beta_sq, lam * alpha * beta)
    if norm < 1e-15:
        # alpha_sq = beta_sq = 1/2 with lam = 0: eigenvectors are not
        # unique, fix the identity rotation.
        cos_theta, sin_theta = 1.0, 0.0
    else:
        cos_theta = zeta_minus_beta_sq / norm
        sin_theta = -lam * alpha * beta / norm
    return MediumPreparation(alpha_sq=float(alpha_sq), beta_sq=float(beta_sq),
                             lam=float(lam), phi=float(phi), zeta=float(zeta),
                             cos_theta=float(cos_theta),
                             sin_theta=float(sin_theta))


def initial_density_matrix(prep: MediumPreparation) -> np.ndarray:
    """3x3 initial density matrix of every atom in the medium.

    Ground-state block ``[[alpha^2, lam*alpha*beta*e^{i phi}], [c.c.,
    beta^2]]`` with an empty excited state.
    """
    coherence = prep.lam * prep.alpha * prep.beta * np.exp(1j * prep.phi)
    rho = np.zeros((3, 3), dtype=complex)
    rho[0, 0] = prep.alpha_sq
    rho[1, 1] = prep.beta_sq
    rho[0, 1] = coherence
    rho[1, 0] = np.conj(coherence)
    return rho


def rotation_matrix(prep: MediumPreparation,
                    column_phases: tuple[float, float] = (0.0, 0.0)) -> np.ndarray:
    """Unitary S whose conjugation diagonalizes the initial density matrix.

    ``S^dag rho0 S = diag(zeta, 1 - zeta, 0)``.  The two ground-state
    columns may carry extra phases (useful to fix plotting sign
    conventions); rotation-invariant observables such as the excited-state
    population, the total Rabi frequency and the spectrum are unaffected.
    """
    chi1, chi2 = column_phases
    s = np.array([
        [prep.cos_theta, prep.sin_theta * np.exp(1j * prep.phi), 0.0],
        [-prep.sin_theta * np.exp(-1j * prep.phi), prep.cos_theta, 0.0],
        [0.0, 0.0, 1.0],
    ], dtype=complex)
    s[:, 0] *= np.exp(1j * chi1)
    s[:, 1] *= np.exp(1j * chi2)
    return s


# =============================================================================
# Detuning quadrature
# =============================================================================

def _hermite_nodes(t2_star: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.hermite.hermgauss(n)
    deltas = np.sqrt(2.0) * x / t2_star
    weights = w / np.sqrt(np.pi)
    return deltas, weights / weights.sum()

# Reach (in line widths) and clustering strength of the sinh-stretched rule.
_SINH_REACH = 8.5
_SINH_C_WIDE = 7.5
_SINH_C_NARROW = 6.0
_UNIFORM_REACH = 6.0


def _moment_correct(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Minimum-norm multiplicative weight correction pinning the Gaussian
    moments 0, 2 and 4 exactly (odd moments vanish by symmetry)."""
    mats = np.vstack([np.ones_like(x), x**2, x**4])
    target = np.array([1.0, 1.0, 3.0])
    scaled = mats * w
    eps = scaled.T @ np.linalg.solve(scaled @ scaled.T, target - mats @ w)
    return w * (1.0 + eps)


def _sinh_nodes(t2_star: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Sinh-stretched trapezoid rule for the Gaussian line.

    The node density grows exponentially toward line center, which keeps
    narrow Lorentzian response factors (pulse durations up to ~100 T2*)
    resolved where plain Gauss-Hermite nodes fail.
    """
    c = _SINH_C_WIDE if n >= 31 else _SINH_C_NARROW
    m = n // 2
    t = np.arange(-m, m + 1) / m
    x = _SINH_REACH * np.sinh(c * t) / np.sinh(c)
    dxdt = _SINH_REACH * c * np.cosh(c * t) / np.sinh(c)
    line = np.exp(-x**2 / 2) / np.sqrt(2 * np.pi)
    w = _moment_correct(x, line * dxdt / m)
    return x / t2_star, w


def _uniform_nodes(t2_star: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniformly spaced rule over +-6 line widths.

    Constant spacing h maximizes the free-induction dephasing horizon
    (~2 pi / h) of the discretized line, which matters for long time
    windows where residually excited atoms keep radiating.
    """
    x = np.linspace(-_UNIFORM_REACH, _UNIFORM_REACH, n)
    h = x[1] - x[0]
    line = np.exp(-x**2 / 2) / np.sqrt(2 * np.pi)
    w = _moment_correct(x, line * h)
    return x / t2_star, w


def make_detuning_ensemble(t2_star: float, n_nodes: int,
                           rule: str = "auto") -> DetuningEnsemble:
    """Quadrature discretization of the Gaussian detuning line.

    ``n_nodes`` must be odd so one node sits exactly at line center;
    ``n_nodes = 1`` yields the single zero-detuning node with unit weight
    (no broadening).  With ``rule="auto"`` small rules use classic
    Gauss-Hermite nodes and from 15 nodes up a sinh-clustered,
    moment-corrected rule that keeps narrow atomic response factors
    resolved.  ``rule="uniform"`` trades some of that clustering for a
    constant node spacing, which maximizes the free-induction dephasing
    horizon (~2 pi / spacing) on long time windows.
    """
    if n_nodes < 1 or n_nodes % 2 == 0:
        raise ValueError("n_nodes must be odd and >= 1")
    if t2_star <= 0:
        raise ValueError("t2_star must be positive")
    if rule not in ("auto", "hermite", "sinh", "uniform"):
        raise ValueError(f"unknown quadrature rule {rule!r}")
    if n_nodes == 1:
        deltas = np.zeros(1)
        weights = np.ones(1)
    elif rule == "uniform":
        deltas, weights = _uniform_nodes(t2_star, n_nodes)
    elif rule == "hermite" or (rule == "auto" and n_nodes < 15):
        deltas, weights = _hermite_nodes(t2_star, n_nodes)
    else:
        deltas, weights = _sinh_nodes(t2_star, n_nodes)
    # Exact symmetry and an exact line-center node.
    order = np.argsort(deltas)
    deltas = deltas[order]
    weights = weights[order]
    center = n_nodes // 2
    deltas[center] = 0.0
    deltas = 0.5 * (deltas - deltas[::-1])
    weights = 0.5 * (weights + weights[::-1])
    weights = weights / weights.sum()
    return DetuningEnsemble(t2_star=float(t2_star), deltas=deltas,
                            weights=weights, line_center_index=center)


def kappa(mu: float, tau: float, ensemble: DetuningEnsemble) -> float:
    """Inverse absorption length for pulses of nominal width ``tau``.

    Quadrature evaluation of ``(mu tau / 2) * <1 / (1 + (Delta tau)^2)>``
    over the ensemble.  The same ensemble must be used by the propagator
    for the value to be the self-consistent scale of the closed-form
    solutions.
    """
    if mu < 0 or tau <= 0:
        raise ValueError("mu must be >= 0 and tau > 0")
    lorentz = 1.0 / (1.0 + (ensemble.deltas * tau) ** 2)
    return float(mu * tau / 2.0 * np.dot(ensemble.weights, lorentz))


def beer_coefficient(mu: float, t2_star: float) -> float:
    """Line-center weak-pulse attenuation coefficient sqrt(pi/2) mu T2*."""
    if mu < 0 or t2_star <= 0:
        raise ValueError("mu must be >= 0 and t2_star > 0")
    return float(np.sqrt(np.pi / 2.0) * t2_star * mu)
