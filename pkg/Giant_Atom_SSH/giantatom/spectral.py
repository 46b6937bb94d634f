"""
Exact diagonalization, state classification, energy equations and the winding number.
"""
import logging
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Sequence, Union

import numpy as np
from scipy import integrate, linalg, optimize

from giantatom.config import max_dimension
from giantatom.errors import NumericalError, PreconditionError
from giantatom.model import (
    Boundary, CouplingConfig, Emitter, HamiltonianMatrix, LatticeParams, LegMode, Variant, assemble, bloch_matrix,
)
from giantatom.util import canonical_order

logger = logging.getLogger(__name__)

DISPERSION_BRANCH = 'principal'
POLE_TOLERANCE = 1e-12


class StateClass(str, Enum):
    BULK = 'Bulk'
    UPPER_BOUND = 'UpperBound'
    LOWER_BOUND = 'LowerBound'
    GAP_MODE = 'GapMode'


class DispersionSample(NamedTuple):
    k: float
    omega_k: complex


class SpectrumResult:
    """Eigenvalues in canonical order with aligned eigenvector columns."""

    ordering = ('real', 'imag')

    def __init__(
        self,
        eigenvalues: np.ndarray,
        right_eigenvectors: np.ndarray,
        left_eigenvectors: Optional[np.ndarray] = None,
        biorthogonal_fallback: Optional[str] = None,
        max_residual: float = 0.0,
    ):
        """
        Constructor.

        :param eigenvalues: Complex eigenvalues.
        :param right_eigenvectors: Columns aligned with eigenvalues.
        :param left_eigenvectors: Columns with <left_p|right_q> = delta_pq, or None.
        :param biorthogonal_fallback: None, 'block' or 'pinv' when degenerate pairing was needed.
        :param max_residual: Largest |H v - E v| over the spectrum.
        """
        self.eigenvalues = np.asarray(eigenvalues, dtype=complex)
        self.right_eigenvectors = np.asarray(right_eigenvectors, dtype=complex)
        self.left_eigenvectors = left_eigenvectors
        self.biorthogonal_fallback = biorthogonal_fallback
        self.max_residual = max_residual

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def state(self, q: int) -> np.ndarray:
        return self.right_eigenvectors[:, q]

    def closest_to(self, value: complex) -> int:
        return int(np.argmin(np.abs(self.eigenvalues - value)))


class Classification:
    """Per-state labels plus the thresholds used to produce them."""

    def __init__(self, labels: List[StateClass], band_min: float, band_max: float, margin: float, ambiguous: List[int]):
        self.labels = labels
        self.band_min = band_min
        self.band_max = band_max
        self.margin = margin
        self.ambiguous = ambiguous

    def __iter__(self):
        return iter(self.labels)

    def __getitem__(self, q: int) -> StateClass:
        return self.labels[q]

    @property
    def counts(self) -> Dict[StateClass, int]:
        return {label: self.labels.count(label) for label in StateClass}

    def indices(self, label: StateClass) -> List[int]:
        return [q for q, value in enumerate(self.labels) if value == label]


def _biorthonormalize(eigenvalues: np.ndarray, right: np.ndarray, left: np.ndarray):
    overlap = left.conj().T @ right
    diag = np.diag(overlap)
    if np.min(np.abs(diag)) > 0:
        left = left / diag.conj()[np.newaxis, :]
    overlap = left.conj().T @ right
    error = np.max(np.abs(overlap - np.eye(len(eigenvalues))))
    if error <= 1e-8:
        return left, None

    # nearly equal eigenvalues: pair inside each cluster
    scale = max(np.max(np.abs(eigenvalues)), 1.0)
    fixed = left.copy()
    visited = np.zeros(len(eigenvalues), dtype=bool)
    for q in range(len(eigenvalues)):
        if visited[q]:
            continue
        cluster = np.flatnonzero(np.abs(eigenvalues - eigenvalues[q]) <= 1e-8 * scale)
        visited[cluster] = True
        if len(cluster) == 1:
            continue
        block = fixed[:, cluster].conj().T @ right[:, cluster]
        fixed[:, cluster] = fixed[:, cluster] @ np.linalg.pinv(block).conj().T
    error = np.max(np.abs(fixed.conj().T @ right - np.eye(len(eigenvalues))))
    if error <= 1e-8:
        logger.warning('degenerate eigenvalues paired blockwise (error %.3g)', error)
        return fixed, 'block'

    fallback = np.linalg.pinv(right).conj().T
    error = np.max(np.abs(fallback.conj().T @ right - np.eye(len(eigenvalues))))
    if error > 1e-6:
        raise NumericalError(f'biorthogonalization failed: |<L|R> - 1| = {error:.3g}')
    logger.warning('left eigenvectors from pseudo-inverse of the right ones (error %.3g)', error)
    return fallback, 'pinv'


def eigendecompose(
    H: Union[HamiltonianMatrix, np.ndarray],
    want_left: bool = False,
    max_dim: Optional[int] = None,
) -> SpectrumResult:
    """
    Full eigensystem of a general complex matrix, sorted by (Re E, Im E).

    :param H: Hamiltonian.
    :param want_left: Also return biorthonormalized left eigenvectors.
    :param max_dim: Dimension cap, defaults to GIANTATOM_SSH_MAX_DIM.
    :return: SpectrumResult.
    """
    matrix = np.asarray(H, dtype=complex)
    limit = max_dim or max_dimension()
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise PreconditionError(f'expected a square matrix, got shape {matrix.shape}')
    if matrix.shape[0] > limit:
        raise PreconditionError(f'dimension {matrix.shape[0]} exceeds the configured maximum {limit}')
    if not np.all(np.isfinite(matrix)):
        raise PreconditionError('matrix has non-finite entries')

    try:
        if want_left:
            values, left, right = linalg.eig(matrix, left=True, right=True)
        else:
            values, right = linalg.eig(matrix)
            left = None
    except linalg.LinAlgError as e:
        raise NumericalError(f'eigensolver did not converge (condition number {np.linalg.cond(matrix):.3g}): {e}')

    order = canonical_order(values)
    values = values[order]
    right = right[:, order]
    right = right / np.linalg.norm(right, axis=0)[np.newaxis, :]

    fallback = None
    if left is not None:
        left, fallback = _biorthonormalize(values, right, left[:, order])

    residual = np.linalg.norm(matrix @ right - right * values[np.newaxis, :], axis=0)
    max_residual = float(np.max(residual)) if len(residual) else 0.0
    logger.debug('eigendecomposed dimension %d, max residual %.3g', matrix.shape[0], max_residual)

    return SpectrumResult(values, right, left, fallback, max_residual)


def dispersion(params: LatticeParams, k, variant: Variant = Variant.NONRECIPROCAL):
    """
    Band energy omega_k = sqrt((t1+gamma+t2 e^{-ik})(t1-gamma+t2 e^{ik})), principal branch.

    :param params: Lattice parameters.
    :param k: Momentum or array of momenta.
    :param variant: Gain/loss chains use t1 both ways and subtract delta^2.
    :return: Complex omega_k with the shape of k.
    """
    k = np.asarray(k, dtype=float)
    if Variant(variant) == Variant.GAIN_LOSS:
        squared = (params.t1 + params.t2 * np.exp(-1j * k)) * (params.t1 + params.t2 * np.exp(1j * k)) - params.delta ** 2
    else:
        squared = (params.forward + params.t2 * np.exp(-1j * k)) * (params.backward + params.t2 * np.exp(1j * k))
    omega = np.sqrt(squared.astype(complex))
    return omega if omega.ndim else complex(omega)


def dispersion_samples(params: LatticeParams, nk: int, variant: Variant = Variant.NONRECIPROCAL):
    """(k, omega_k) arrays on k = 2 pi j / nk."""
    k = 2.0 * np.pi * np.arange(nk) / nk
    return k, dispersion(params, k, variant)


def band_hull(params: LatticeParams, nk: int, variant: Variant = Variant.NONRECIPROCAL):
    _, omega = dispersion_samples(params, nk, variant)
    magnitude = np.abs(omega)
    return float(np.min(magnitude)), float(np.max(magnitude))


def classify_states(
    spec: SpectrumResult,
    params: LatticeParams,
    margin: Optional[float] = None,
    nk: Optional[int] = None,
    variant: Variant = Variant.NONRECIPROCAL,
) -> Classification:
    """
    Label states against the sampled band hull {|omega_k|}.

    :param spec: Spectrum of an atom-coupled model.
    :param params: Lattice parameters of the chain.
    :param margin: Distance from the hull below which a state is ambiguous.
    :param nk: Hull sample count, 16 L by default.
    :param variant: Chain variant used for the hull.
    :return: Classification.
    """
    nk = nk or 16 * params.L
    band_min, band_max = band_hull(params, nk, variant)
    if margin is None:
        margin = 1e-6 * band_max

    labels = []
    ambiguous = []
    for q, energy in enumerate(spec.eigenvalues):
        size = abs(energy)
        if size > band_max + margin:
            labels.append(StateClass.UPPER_BOUND if energy.real >= 0 else StateClass.LOWER_BOUND)
        elif size < band_min - margin:
            labels.append(StateClass.GAP_MODE)
        else:
            if abs(size - band_max) <= margin or abs(size - band_min) <= margin:
                ambiguous.append(q)
            labels.append(StateClass.BULK)

    if ambiguous:
        logger.warning('%d states within %.3g of the band hull, labelled Bulk', len(ambiguous), margin)

    return Classification(labels, band_min, band_max, margin, ambiguous)


def _momenta(L: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(L) / L


def _check_giant(config: CouplingConfig, mode: LegMode):
    if config.emitter != Emitter.GIANT_ATOM:
        raise PreconditionError('energy equations are defined for a giant atom')
    if config.mode != mode:
        raise PreconditionError(f'coupling mode is {config.mode.value}, expected {mode.value}')


def _denominators(E: complex, params: LatticeParams, L: int) -> np.ndarray:
    k = _momenta(L)
    denominator = E * E - dispersion(params, k) ** 2
    closest = float(np.min(np.abs(denominator)))
    if closest < POLE_TOLERANCE:
        raise PreconditionError(f'E = {E} is within {closest:.3g} of a band pole')
    return denominator


def selfenergy_AB(E: complex, params: LatticeParams, config: CouplingConfig, L: Optional[int] = None) -> complex:
    """
    Finite-ring self-energy of the giant atom with legs on A_n and B_m.

    With equal couplings this is (2g^2/L) sum_k [E + t1 cos(kd) - i gamma sin(kd)
    + t2 cos(k(d+1))] / (E^2 - omega_k^2), d = m - n.
    """
    _check_giant(config, LegMode.AB)
    L = L or params.L
    E = complex(E)
    k = _momenta(L)
    d = config.m - config.n
    denominator = _denominators(E, params, L)
    cross = params.t1 * np.cos(k * d) - 1j * params.gamma * np.sin(k * d) + params.t2 * np.cos(k * (d + 1))
    numerator = (config.g_n ** 2 + config.g_m ** 2) * E + 2.0 * config.g_n * config.g_m * cross
    return complex(np.sum(numerator / denominator) / L)


def selfenergy_AA(E: complex, params: LatticeParams, config: CouplingConfig, L: Optional[int] = None) -> complex:
    """Finite-ring self-energy with both legs on A sites."""
    _check_giant(config, LegMode.AA)
    L = L or params.L
    E = complex(E)
    k = _momenta(L)
    d = config.m - config.n
    denominator = _denominators(E, params, L)
    numerator = E * (config.g_n ** 2 + config.g_m ** 2 + 2.0 * config.g_n * config.g_m * np.cos(k * d))
    return complex(np.sum(numerator / denominator) / L)


def energy_residual_AB(E: complex, params: LatticeParams, config: CouplingConfig, L: Optional[int] = None) -> complex:
    """E minus the AB self-energy; vanishes at eigenvalues of the coupled ring."""
    return complex(E) - selfenergy_AB(E, params, config, L)


def energy_residual_AA(E: complex, params: LatticeParams, config: CouplingConfig, L: Optional[int] = None) -> complex:
    """E minus the AA self-energy; zero at E = 0 for every parameter set."""
    return complex(E) - selfenergy_AA(E, params, config, L)


SELFENERGY_MAP = {
    LegMode.AB: selfenergy_AB,
    LegMode.AA: selfenergy_AA,
}


def selfenergy_quadrature(E: complex, params: LatticeParams, config: CouplingConfig) -> complex:
    """
    Infinite-ring self-energy, (1/2pi) times the k-integral of the finite-ring summand.

    :param E: Energy away from the band.
    :param params: Lattice parameters.
    :param config: Giant-atom coupling.
    :return: Complex self-energy.
    """
    _check_giant(config, config.mode)
    E = complex(E)
    d = config.m - config.n
    g_n, g_m = config.g_n, config.g_m

    def summand(k: float) -> complex:
        denominator = E * E - dispersion(params, k) ** 2
        if config.mode == LegMode.AB:
            cross = params.t1 * np.cos(k * d) - 1j * params.gamma * np.sin(k * d) + params.t2 * np.cos(k * (d + 1))
            return ((g_n ** 2 + g_m ** 2) * E + 2.0 * g_n * g_m * cross) / denominator
        return E * (g_n ** 2 + g_m ** 2 + 2.0 * g_n * g_m * np.cos(k * d)) / denominator

    real, _ = integrate.quad(lambda k: summand(k).real, -np.pi, np.pi, limit=400)
    imag, _ = integrate.quad(lambda k: summand(k).imag, -np.pi, np.pi, limit=400)
    return complex(real, imag) / (2.0 * np.pi)


def zero_mode_selfenergy_closed(params: LatticeParams, d: int, g: float = 1.0) -> complex:
    """
    Residue-theorem value of the AB self-energy at E = 0 on an infinite ring.

    Each intracell hopping whose magnitude exceeds |t2| contributes
    -g^2/h (-t2/h)^d with h = t1 + gamma or t1 - gamma; inside the window
    -t2+gamma < t1 < t2-gamma neither does and the value is 0.

    :param params: Lattice parameters.
    :param d: Leg separation m - n >= 0.
    :param g: Coupling strength.
    :return: Self-energy at E = 0.
    """
    if d < 0:
        raise PreconditionError('leg separation d = m - n must be non-negative')
    t2 = abs(params.t2)
    value = 0j
    for hop in (params.forward, params.backward):
        if abs(abs(hop) - t2) <= 1e-12 * t2:
            raise PreconditionError(f't1 = {params.t1} sits on a branch boundary, closed form is singular')
        if abs(hop) > t2:
            value += -g ** 2 / hop * (-params.t2 / hop) ** d
    return complex(value)


def solve_bound_energy(params: LatticeParams, config: CouplingConfig, guess: complex, tol: float = 1e-12) -> complex:
    """
    Root of E = Sigma(E) near a guess, by secant iteration in the complex plane.

    :param params: Lattice parameters.
    :param config: Giant-atom coupling.
    :param guess: Starting energy outside the band.
    :param tol: Step tolerance.
    :return: Root energy.
    """
    selfenergy = SELFENERGY_MAP[config.mode]
    x0 = complex(guess)
    try:
        root = optimize.newton(
            lambda e: e - selfenergy(e, params, config), x0, x1=x0 * (1 + 1e-4) + 1e-4, tol=tol, maxiter=200,
        )
    except (RuntimeError, PreconditionError) as e:
        raise NumericalError(f'energy equation did not converge from {guess}: {e}')
    logger.debug('bound energy %s from guess %s', root, guess)
    return complex(root)


def count_complex(eigenvalues: Sequence[complex], tol: float = 1e-8) -> int:
    """Number of eigenvalues with |Im E| > tol."""
    return int(np.sum(np.abs(np.imag(eigenvalues)) > tol))


def exceptional_point_sweep(
    params: LatticeParams,
    config: CouplingConfig,
    t1_values: Sequence[float],
    boundary: Boundary = Boundary.PBC,
    tol: float = 1e-8,
) -> List[int]:
    """Count of strictly complex eigenvalues for each t1."""
    counts = []
    for t1 in t1_values:
        spec = eigendecompose(assemble(params.model_copy(update={'t1': float(t1)}), config, boundary))
        counts.append(count_complex(spec.eigenvalues, tol))
    return counts


class WindingResult(NamedTuple):
    raw: float
    rounded: float
    laps: int


def winding_number(params: LatticeParams, Nk: int = 2048, gap_tol: float = 1e-8) -> WindingResult:
    """
    Biorthogonal winding number from a gauge-invariant product of overlaps.

    The band E(k) = sqrt(p q) is followed continuously around the Brillouin zone with
    |R> = (p, E) and <L| = (q, E) / 2E^2, so that <L|R> = 1. The phase of the product
    of <L_j|R_{j+1}> gives -pi v. When the band returns to -E after one lap it is
    followed for a second lap and the phase halved.

    :param params: Lattice parameters of the bare chain.
    :param Nk: Momentum samples per lap.
    :param gap_tol: Smallest admissible |omega_k|.
    :return: WindingResult(raw, rounded, laps).
    """
    k = 2.0 * np.pi * np.arange(2 * Nk + 1) / Nk
    blocks = np.array([bloch_matrix(params, kk) for kk in k])
    p = blocks[:, 0, 1]
    q = blocks[:, 1, 0]
    squared = p * q
    if min(np.min(np.abs(p[:Nk])), np.min(np.abs(q[:Nk]))) < gap_tol:
        raise PreconditionError(f'gap closes on the Bloch circle at t1 = {params.t1}')

    energy = np.empty(len(k), dtype=complex)
    energy[0] = np.sqrt(squared[0])
    for j in range(1, len(k)):
        candidate = np.sqrt(squared[j])
        energy[j] = candidate if abs(candidate - energy[j - 1]) <= abs(candidate + energy[j - 1]) else -candidate

    laps = 1 if abs(energy[Nk] - energy[0]) <= abs(energy[Nk] + energy[0]) else 2
    steps = laps * Nk

    right = np.stack([p, energy], axis=1)
    left = np.stack([q, energy], axis=1) / (2.0 * energy * energy)[:, np.newaxis]
    overlaps = np.einsum('ij,ij->i', left[:steps], right[1:steps + 1])
    raw = float(-np.sum(np.angle(overlaps)) / (np.pi * laps))
    rounded = float(np.round(2.0 * raw) / 2.0)
    if laps == 2:
        logger.warning('bands exchange around the Brillouin zone at t1 = %s, winding is half-integer', params.t1)
    return WindingResult(raw, rounded, laps)
