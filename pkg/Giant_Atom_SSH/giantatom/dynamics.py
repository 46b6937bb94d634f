"""
Single-excitation real-time evolution and the Lyapunov exponent along space-time rays.
"""
import logging
from enum import Enum
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from giantatom.errors import NumericalError, PreconditionError
from giantatom.model import CouplingConfig, Emitter, HamiltonianMatrix, SiteIndexing
from giantatom.propagators import ExpmPropagator, PropagatorABC, RungeKuttaPropagator
from giantatom.util import round_half_toward_zero

logger = logging.getLogger(__name__)

AMPLITUDE_FLOOR = 1e-300
DENSE_LIMIT = 1024


class Stepper(str, Enum):
    AUTO = 'auto'
    MATRIX_EXPONENTIAL_SCALED = 'expm'
    ADAPTIVE_RK = 'rk'


class EvolutionConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    t_final: float = 50.0
    stepper: Stepper = Stepper.AUTO
    rtol: float = 1e-10
    atol: float = 1e-12
    segment: float = 5.0


def make_propagator(dimension: int, config: EvolutionConfig) -> PropagatorABC:
    stepper = config.stepper
    if stepper == Stepper.AUTO:
        stepper = Stepper.MATRIX_EXPONENTIAL_SCALED if dimension <= DENSE_LIMIT else Stepper.ADAPTIVE_RK
    logger.debug('stepper %s for dimension %d', stepper.value, dimension)
    if stepper == Stepper.MATRIX_EXPONENTIAL_SCALED:
        return ExpmPropagator(config.rtol, config.atol)
    return RungeKuttaPropagator(config.rtol, config.atol)


def initial_bulk_state(L: int, n_atoms: int = 0) -> np.ndarray:
    """
    1/sqrt(2) on A and B of the centre cell (L+1)/2.

    :param L: Odd number of cells.
    :param n_atoms: Atom levels in the target Hilbert space.
    :return: Unit vector.
    """
    if L % 2 == 0:
        raise PreconditionError(f'the bulk source needs odd L, got {L}')
    indexing = SiteIndexing(L, n_atoms)
    centre = (L + 1) // 2
    psi = np.zeros(indexing.dimension, dtype=complex)
    psi[indexing.offset(centre, 'A')] = 1.0 / np.sqrt(2.0)
    psi[indexing.offset(centre, 'B')] = 1.0 / np.sqrt(2.0)
    return psi


def evolve(
    H: Union[HamiltonianMatrix, np.ndarray],
    psi0: np.ndarray,
    t: Optional[float] = None,
    config: Optional[EvolutionConfig] = None,
) -> np.ndarray:
    """
    psi(t) = exp(-iHt) psi0 without renormalization.

    :param H: Hamiltonian.
    :param psi0: Initial state.
    :param t: Time, t >= 0; config.t_final when omitted.
    :param config: Stepper choice and tolerances.
    :return: State at time t.
    """
    config = config or EvolutionConfig()
    t = config.t_final if t is None else t
    if t < 0:
        raise PreconditionError('evolution time must be non-negative')
    matrix = np.asarray(H, dtype=complex)
    if not np.all(np.isfinite(matrix)):
        raise PreconditionError('Hamiltonian has non-finite entries')

    psi = make_propagator(matrix.shape[0], config)(matrix, psi0, t)
    if not np.all(np.isfinite(psi)):
        _, _, blowup = evolve_log(matrix, psi0, t, config)
        raise NumericalError(f'state overflowed near t = {blowup:.6g}; use evolve_log')
    return psi


def evolve_log(
    H: Union[HamiltonianMatrix, np.ndarray],
    psi0: np.ndarray,
    t: Optional[float] = None,
    config: Optional[EvolutionConfig] = None,
) -> Tuple[np.ndarray, float, Optional[float]]:
    """
    Segmented evolution that renormalizes after every segment.

    :param H: Hamiltonian.
    :param psi0: Initial state.
    :param t: Time; config.t_final when omitted.
    :param config: Stepper choice, tolerances and segment length.
    :return: (unit state, log of the accumulated norm, time at which a plain run would overflow or None).
    """
    config = config or EvolutionConfig()
    t = config.t_final if t is None else t
    matrix = np.asarray(H, dtype=complex)
    propagator = make_propagator(matrix.shape[0], config)
    segments = max(1, int(np.ceil(t / config.segment)))
    step = t / segments

    psi = np.asarray(psi0, dtype=complex)
    log_norm = float(np.log(np.linalg.norm(psi)))
    psi = psi / np.linalg.norm(psi)
    overflow_at = None
    limit = np.log(np.finfo(float).max)

    for j in range(segments):
        psi = propagator(matrix, psi, step)
        norm = np.linalg.norm(psi)
        if not np.isfinite(norm) or norm == 0:
            raise NumericalError(f'segment {j} of length {step:.6g} overflowed')
        log_norm += float(np.log(norm))
        psi = psi / norm
        if overflow_at is None and log_norm > limit:
            overflow_at = (j + 1) * step

    return psi, log_norm, overflow_at


class LyapunovCurve:
    """lambda(v) = log|psi_{centre + round(v t)}(t)| / t on one sublattice."""

    def __init__(
        self,
        v_grid: np.ndarray,
        lam: np.ndarray,
        t_obs: float,
        channel: str,
        floored: np.ndarray,
        model_tag: str = '',
    ):
        self.v_grid = np.asarray(v_grid, dtype=float)
        self.lam = np.asarray(lam, dtype=float)
        self.t_obs = t_obs
        self.channel = channel
        self.floored = np.asarray(floored, dtype=bool)
        self.model_tag = model_tag

    def argmax_velocity(self) -> float:
        return argmax_velocity(self)


def argmax_velocity(curve: LyapunovCurve) -> float:
    """Drift velocity of the largest exponent."""
    return float(curve.v_grid[int(np.argmax(curve.lam))])


def _check_wavefront(L: int, v_grid: np.ndarray, t_obs: float, coupling: Optional[CouplingConfig], margin: int):
    centre = (L + 1) // 2
    reach = float(np.max(np.abs(v_grid))) * t_obs
    if reach >= (L - 1) / 2 - margin:
        raise PreconditionError(f'ray reach {reach:.3g} cells wraps a ring of {L} cells')
    if coupling is not None and coupling.emitter != Emitter.NO_ATOM:
        indexing = SiteIndexing(L)
        nearest = min(indexing.cell_distance(centre, leg) for leg in (coupling.n, coupling.m))
        if reach >= nearest - margin:
            raise PreconditionError(f'ray reach {reach:.3g} cells touches a leg {nearest} cells from the source')


def lyapunov_from_state(
    psi: np.ndarray,
    log_norm: float,
    L: int,
    t_obs: float,
    v_grid: Sequence[float],
    channel: str = 'A',
    model_tag: str = '',
) -> LyapunovCurve:
    """
    Read lambda(v) off one evolved state.

    :param psi: Unit state at t_obs.
    :param log_norm: Log of the norm removed from psi.
    :param L: Number of cells.
    :param t_obs: Observation time.
    :param v_grid: Drift velocities.
    :param channel: 'A' or 'B'.
    :param model_tag: Label carried into exports.
    :return: LyapunovCurve.
    """
    if channel not in ('A', 'B'):
        raise PreconditionError(f"channel must be 'A' or 'B', got {channel}")
    indexing = SiteIndexing(L, len(psi) - 2 * L)
    centre = (L + 1) // 2
    v_grid = np.asarray(v_grid, dtype=float)

    lam = np.empty(len(v_grid))
    floored = np.zeros(len(v_grid), dtype=bool)
    for j, v in enumerate(v_grid):
        cell = centre + round_half_toward_zero(v * t_obs)
        amplitude = abs(psi[indexing.offset(cell, channel)])
        if amplitude < AMPLITUDE_FLOOR:
            amplitude = AMPLITUDE_FLOOR
            floored[j] = True
        lam[j] = (log_norm + np.log(amplitude)) / t_obs

    if np.any(floored):
        logger.warning('%d ray amplitudes floored at %.0e', int(np.sum(floored)), AMPLITUDE_FLOOR)
    return LyapunovCurve(v_grid, lam, t_obs, channel, floored, model_tag)


def lyapunov(
    H: HamiltonianMatrix,
    v_grid: Sequence[float] = None,
    t_obs: float = 50.0,
    channel: str = 'A',
    coupling: Optional[CouplingConfig] = None,
    config: Optional[EvolutionConfig] = None,
    margin: int = 1,
    model_tag: str = '',
) -> LyapunovCurve:
    """
    Lyapunov exponent of the centre-cell excitation along rays n = v t.

    :param H: Hamiltonian of an odd ring.
    :param v_grid: Drift velocities, 81 points on [-2, 2] by default.
    :param t_obs: Observation time.
    :param channel: Sublattice read out.
    :param coupling: Emitter legs, checked against the wavefront.
    :param config: Evolution settings.
    :param margin: Safety distance in cells.
    :param model_tag: Label carried into exports.
    :return: LyapunovCurve.
    """
    v_grid = np.linspace(-2.0, 2.0, 81) if v_grid is None else np.asarray(v_grid, dtype=float)
    L = H.L
    _check_wavefront(L, v_grid, t_obs, coupling, margin)
    psi0 = initial_bulk_state(L, H.n_atoms)
    psi, log_norm, _ = evolve_log(H, psi0, t_obs, config)
    logger.info('evolved %s to t = %s, log norm %.4g', model_tag or 'state', t_obs, log_norm)
    return lyapunov_from_state(psi, log_norm, L, t_obs, v_grid, channel, model_tag)


def lyapunov_channels(
    H: HamiltonianMatrix,
    v_grid: Sequence[float],
    t_obs: float,
    coupling: Optional[CouplingConfig] = None,
    config: Optional[EvolutionConfig] = None,
    margin: int = 1,
    model_tag: str = '',
) -> Tuple[LyapunovCurve, LyapunovCurve]:
    """A- and B-channel curves read off a single trajectory."""
    v_grid = np.asarray(v_grid, dtype=float)
    _check_wavefront(H.L, v_grid, t_obs, coupling, margin)
    psi, log_norm, _ = evolve_log(H, initial_bulk_state(H.L, H.n_atoms), t_obs, config)
    return tuple(
        lyapunov_from_state(psi, log_norm, H.L, t_obs, v_grid, channel, model_tag) for channel in ('A', 'B')
    )
