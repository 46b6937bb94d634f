"""
Localization measures: chain-restricted inverse participation ratio and the
beta roots of the bulk eigen-equation.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from giantatom.errors import PreconditionError
from giantatom.model import Boundary, CouplingConfig, LatticeParams, SiteIndexing, Variant, assemble
from giantatom.spectral import Classification, SpectrumResult, StateClass, classify_states, eigendecompose
from giantatom.util import REDUCE_MAP, quadratic_roots

logger = logging.getLogger(__name__)

EMPTY_CHAIN_WEIGHT = 1e-12


class IprReport:
    """Per-state IPR over the chain sites and its average."""

    def __init__(self, per_state: np.ndarray, used: np.ndarray, include_atom: bool, reduce_option: str = 'mean'):
        """
        Constructor.

        :param per_state: IPR of every state, NaN for excluded states.
        :param used: Mask of states entering the average.
        :param include_atom: Whether atom amplitudes were part of the site set.
        :param reduce_option: Reduction from REDUCE_MAP used for the average.
        """
        self.per_state = per_state
        self.used = used
        self.include_atom = include_atom
        self.reduce_option = reduce_option

    @property
    def average(self) -> float:
        return float(REDUCE_MAP[self.reduce_option](self.per_state[self.used]))

    @property
    def state_count(self) -> int:
        return int(np.sum(self.used))

    @property
    def excluded(self) -> int:
        return int(len(self.used) - np.sum(self.used))


def inverse_participation(vectors: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    sum |psi|^4 / (sum |psi|^2)^2 for each column.

    :param vectors: States as columns.
    :return: (ipr, usable) where usable marks columns with nonzero weight.
    """
    weight = np.abs(np.asarray(vectors)) ** 2
    norm = np.sum(weight, axis=0)
    usable = norm >= EMPTY_CHAIN_WEIGHT
    ipr = np.full(weight.shape[1], np.nan)
    ipr[usable] = np.sum(weight[:, usable] ** 2, axis=0) / norm[usable] ** 2
    return ipr, usable


def ipr(spec: SpectrumResult, L: int, include_atom: bool = False, reduce_option: str = 'mean') -> IprReport:
    """
    Modified averaged IPR: every eigenstate, restricted to chain sites 1..2L.

    :param spec: Spectrum with right eigenvectors.
    :param L: Number of cells.
    :param include_atom: Keep atom amplitudes in the site set.
    :param reduce_option: 'mean' for the average, or any REDUCE_MAP key.
    :return: IprReport.
    """
    if reduce_option not in REDUCE_MAP:
        raise PreconditionError(f'unknown reduce option {reduce_option}')
    vectors = spec.right_eigenvectors if include_atom else spec.right_eigenvectors[:2 * L]
    per_state, used = inverse_participation(vectors)
    report = IprReport(per_state, used, include_atom, reduce_option)
    if report.excluded:
        logger.warning('%d states carry no chain weight and are left out of the IPR average', report.excluded)
    return report


def mean_ipr(
    params: LatticeParams,
    config: CouplingConfig,
    boundary: Boundary = Boundary.PBC,
    variant: Variant = Variant.NONRECIPROCAL,
) -> float:
    spec = eigendecompose(assemble(params, config, boundary, variant))
    return ipr(spec, params.L).average


def ipr_heatmap(
    params: LatticeParams,
    config: CouplingConfig,
    gm_values: Sequence[float],
    gn_values: Sequence[float],
    boundary: Boundary = Boundary.PBC,
    threads: int = 1,
) -> List[Tuple[float, float, float]]:
    """
    Average IPR over a (g_m, g_n) grid, g_m outer and g_n inner.

    :param params: Lattice parameters.
    :param config: Coupling whose strengths are replaced per grid point.
    :param gm_values: Right-leg strengths.
    :param gn_values: Left-leg strengths.
    :param boundary: PBC or OBC.
    :param threads: Worker count.
    :return: Rows (g_m, g_n, IPR average).
    """
    points = [(float(gm), float(gn)) for gm in gm_values for gn in gn_values]

    def evaluate(point: Tuple[float, float]) -> float:
        gm, gn = point
        return mean_ipr(params, config.model_copy(update={'g_m': gm, 'g_n': gn}), boundary)

    with ThreadPoolExecutor(max_workers=threads) as executor:
        values = list(executor.map(evaluate, points))

    logger.info('IPR grid of %d points done', len(points))
    return [(gm, gn, value) for (gm, gn), value in zip(points, values)]


def ipr_vs_g(
    params: LatticeParams,
    config: CouplingConfig,
    g_values: Sequence[float],
    boundary: Boundary = Boundary.PBC,
    threads: int = 1,
) -> List[Tuple[float, float]]:
    """Average IPR with equal strengths g at both legs."""
    with ThreadPoolExecutor(max_workers=threads) as executor:
        values = list(executor.map(
            lambda g: mean_ipr(params, config.model_copy(update={'g_m': float(g), 'g_n': float(g)}), boundary),
            g_values,
        ))
    return [(float(g), value) for g, value in zip(g_values, values)]


class BetaPair(NamedTuple):
    Delta: complex
    beta1: complex
    beta2: complex
    degenerate: bool


def beta_of_energy(E: complex, params: LatticeParams) -> BetaPair:
    """
    Roots of t2 (t1+gamma) beta^2 - Delta beta + t2 (t1-gamma) = 0 with
    Delta = E^2 + gamma^2 - t1^2 - t2^2, ordered |beta1| >= |beta2|.

    :param E: Eigen-energy.
    :param params: Lattice parameters.
    :return: BetaPair.
    """
    if params.forward == 0:
        raise PreconditionError('t1 = -gamma: the beta equation loses its quadratic term')
    E = complex(E)
    delta = E * E + params.gamma ** 2 - params.t1 ** 2 - params.t2 ** 2
    beta1, beta2, degenerate = quadratic_roots(params.t2 * params.forward, -delta, params.t2 * params.backward)
    if degenerate:
        logger.warning('degenerate beta discriminant at E = %s', E)
    return BetaPair(delta, beta1, beta2, degenerate)


def reference_lines(params: LatticeParams) -> dict:
    """|beta| = 1, the open-chain value sqrt|r| and |r| with r = (t1-gamma)/(t1+gamma)."""
    ratio = abs(params.backward / params.forward)
    return {'unit': 1.0, 'open_chain': float(np.sqrt(ratio)), 'product': float(ratio)}


class BetaProfile(NamedTuple):
    rows: List[Tuple[int, complex, float, float]]
    reference: dict


def beta_profile(
    spec: SpectrumResult,
    params: LatticeParams,
    labels: Optional[Classification] = None,
    state_filter: Optional[StateClass] = StateClass.BULK,
) -> BetaProfile:
    """
    (q, E, |beta1|, |beta2|) for the states passing the filter, by q.

    :param spec: Spectrum.
    :param params: Lattice parameters.
    :param labels: Classification; computed when omitted.
    :param state_filter: Keep only this class, or None for every state.
    :return: BetaProfile with reference lines.
    """
    if state_filter is not None and labels is None:
        labels = classify_states(spec, params)
    rows = []
    for q, energy in enumerate(spec.eigenvalues):
        if state_filter is not None and labels[q] != state_filter:
            continue
        pair = beta_of_energy(energy, params)
        rows.append((q, complex(energy), abs(pair.beta1), abs(pair.beta2)))
    return BetaProfile(rows, reference_lines(params))


def spatial_decay_rate(psi: np.ndarray, L: int, sublattice: str, cells: Sequence[int]) -> float:
    """
    Per-cell |ratio| from a least-squares line through log|psi| on one sublattice.

    :param psi: State in flat order.
    :param L: Number of cells.
    :param sublattice: 'A' or 'B'.
    :param cells: Cells used in the fit.
    :return: exp(slope).
    """
    indexing = SiteIndexing(L, len(psi) - 2 * L)
    cells = np.asarray(cells)
    amplitudes = np.abs([psi[indexing.offset(int(c), sublattice)] for c in cells])
    if np.any(amplitudes == 0):
        raise PreconditionError('state vanishes on a fitted site')
    slope, _ = np.polyfit(cells, np.log(amplitudes), 1)
    return float(np.exp(slope))
