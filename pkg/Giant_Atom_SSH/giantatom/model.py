"""
Real-space Hamiltonians of the nonreciprocal SSH ring with giant or small atoms.

Flat site order is A_1, B_1, ..., A_L, B_L followed by the atom levels. Every
other module goes through :class:`SiteIndexing` to address sites.
"""
import json
import logging
from enum import Enum
from typing import Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from giantatom.errors import ConfigError

logger = logging.getLogger(__name__)


class Boundary(str, Enum):
    PBC = 'pbc'
    OBC = 'obc'


class Variant(str, Enum):
    NONRECIPROCAL = 'nonreciprocal'
    GAIN_LOSS = 'gain_loss'


class Emitter(str, Enum):
    GIANT_ATOM = 'giant'
    TWO_SMALL_ATOMS = 'two_small'
    NO_ATOM = 'none'


class LegMode(str, Enum):
    AB = 'AB'
    AA = 'AA'


class Sublattice(str, Enum):
    A = 'A'
    B = 'B'


class LatticeParams(BaseModel):
    """Chain couplings and cell count."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    L: int = 50
    t1: float = 0.2
    t2: float = 1.0
    gamma: float = 0.5
    delta: float = 0.0

    @field_validator('L')
    @classmethod
    def _check_cells(cls, value: int) -> int:
        if value < 2:
            raise ValueError('L must be at least 2')
        return value

    @field_validator('t2')
    @classmethod
    def _check_t2(cls, value: float) -> float:
        if value == 0:
            raise ValueError('t2 must be nonzero')
        return value

    @property
    def forward(self) -> float:
        """Intracell hopping A_l <- B_l, t1 + gamma."""
        return self.t1 + self.gamma

    @property
    def backward(self) -> float:
        """Intracell hopping B_l <- A_l, t1 - gamma."""
        return self.t1 - self.gamma


class CouplingConfig(BaseModel):
    """Which emitter is attached to the ring and where."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    emitter: Emitter = Emitter.GIANT_ATOM
    mode: LegMode = LegMode.AB
    n: int = 1
    m: int = 1
    g_n: float = 1.0
    g_m: float = 1.0

    @model_validator(mode='after')
    def _check_legs(self) -> 'CouplingConfig':
        if self.emitter != Emitter.NO_ATOM:
            if self.n < 1 or self.m < self.n:
                raise ValueError('legs must satisfy 1 <= n <= m')
        if not (np.isfinite(self.g_n) and np.isfinite(self.g_m)):
            raise ValueError('couplings must be finite')
        return self

    @classmethod
    def equal(
        cls,
        n: int,
        m: int,
        g: float,
        mode: LegMode = LegMode.AB,
        emitter: Emitter = Emitter.GIANT_ATOM,
    ) -> 'CouplingConfig':
        """
        Same strength at both legs.

        :param n: Cell of the left leg.
        :param m: Cell of the right leg.
        :param g: Coupling strength.
        :param mode: AB or AA legs.
        :param emitter: Emitter kind.
        :return: The coupling config.
        """
        return cls(emitter=emitter, mode=mode, n=n, m=m, g_n=g, g_m=g)

    @classmethod
    def none(cls) -> 'CouplingConfig':
        return cls(emitter=Emitter.NO_ATOM, g_n=0.0, g_m=0.0)

    @property
    def n_atoms(self) -> int:
        return {Emitter.GIANT_ATOM: 1, Emitter.TWO_SMALL_ATOMS: 2, Emitter.NO_ATOM: 0}[self.emitter]

    @property
    def leg_sublattices(self) -> Tuple[Sublattice, Sublattice]:
        if self.mode == LegMode.AB:
            return Sublattice.A, Sublattice.B
        return Sublattice.A, Sublattice.A


class SiteIndexing:
    """Flat index convention. Public indices are 1-based, offsets are 0-based."""

    def __init__(self, L: int, n_atoms: int = 0):
        """
        Constructor.

        :param L: Number of unit cells.
        :param n_atoms: Number of atom levels appended after the chain.
        """
        if n_atoms not in (0, 1, 2):
            raise ConfigError('atom level count must be 0, 1 or 2', 'coupling.emitter')
        self.L = L
        self.n_atoms = n_atoms

    @property
    def dimension(self) -> int:
        return 2 * self.L + self.n_atoms

    def site_index(self, cell: int, sublattice: Union[Sublattice, str]) -> int:
        """
        1-based flat index of a chain site.

        :param cell: Cell number in 1..L.
        :param sublattice: A or B.
        :return: A_l -> 2(l-1)+1, B_l -> 2l.
        """
        if not 1 <= cell <= self.L:
            raise ConfigError(f'cell {cell} outside 1..{self.L}', 'coupling')
        if Sublattice(sublattice) == Sublattice.A:
            return 2 * (cell - 1) + 1
        return 2 * cell

    def offset(self, cell: int, sublattice: Union[Sublattice, str]) -> int:
        return self.site_index(cell, sublattice) - 1

    def atom_index(self, k: int = 1) -> int:
        if not 1 <= k <= self.n_atoms:
            raise ConfigError(f'atom {k} does not exist', 'coupling.emitter')
        return 2 * self.L + k

    def atom_offset(self, k: int = 1) -> int:
        return self.atom_index(k) - 1

    def cell_of(self, index: int) -> Tuple[str, int]:
        """
        Inverse of the convention.

        :param index: 1-based flat index.
        :return: ('A', l), ('B', l) or ('atom', k).
        """
        if not 1 <= index <= self.dimension:
            raise ConfigError(f'index {index} outside 1..{self.dimension}')
        if index > 2 * self.L:
            return 'atom', index - 2 * self.L
        cell = (index + 1) // 2
        return ('A' if index % 2 == 1 else 'B'), cell

    def cell_distance(self, first: int, second: int) -> int:
        """Distance between cells on the ring."""
        d = abs(first - second) % self.L
        return min(d, self.L - d)


class HamiltonianMatrix:
    """Immutable dense one-excitation Hamiltonian with its provenance."""

    def __init__(
        self,
        matrix: np.ndarray,
        L: int,
        boundary: Boundary,
        variant: Variant,
        n_atoms: int = 0,
    ):
        """
        Constructor.

        :param matrix: Square complex array of dimension 2L + n_atoms.
        :param L: Number of unit cells.
        :param boundary: PBC or OBC.
        :param variant: Nonreciprocal or gain/loss chain.
        :param n_atoms: Atom levels appended to the chain.
        """
        matrix = np.array(matrix, dtype=complex)
        if matrix.shape != (2 * L + n_atoms, 2 * L + n_atoms):
            raise ConfigError(f'matrix shape {matrix.shape} does not match L={L}, atoms={n_atoms}')
        matrix.flags.writeable = False
        self.matrix = matrix
        self.L = L
        self.boundary = Boundary(boundary)
        self.variant = Variant(variant)
        self.n_atoms = n_atoms
        self.indexing = SiteIndexing(L, n_atoms)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def is_hermitian(self, tol: float = 0.0) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T)) <= tol)

    def to_json(self) -> str:
        """Row-major dump with complex entries as [re, im] pairs."""
        rows = [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix]
        return json.dumps({
            'dimension': self.dimension,
            'L': self.L,
            'n_atoms': self.n_atoms,
            'boundary': self.boundary.value,
            'variant': self.variant.value,
            'entries': rows,
        })

    @classmethod
    def from_json(cls, payload: str) -> 'HamiltonianMatrix':
        data = json.loads(payload)
        entries = np.array(data['entries'], dtype=float)
        matrix = entries[..., 0] + 1j * entries[..., 1]
        return cls(matrix, data['L'], Boundary(data['boundary']), Variant(data['variant']), data['n_atoms'])


def _check_params(params: LatticeParams):
    if params.L < 2:
        raise ConfigError('L must be at least 2', 'lattice.L')
    if params.t2 == 0:
        raise ConfigError('t2 must be nonzero', 'lattice.t2')


def _chain(params: LatticeParams, boundary: Boundary, forward: float, backward: float) -> np.ndarray:
    L = params.L
    h = np.zeros((2 * L, 2 * L), dtype=complex)

    for cell in range(L):
        a_idx = 2 * cell
        b_idx = 2 * cell + 1
        h[a_idx, b_idx] = forward
        h[b_idx, a_idx] = backward

        nxt = cell + 1
        if nxt == L:
            if boundary == Boundary.OBC:
                continue
            nxt = 0
        a_next = 2 * nxt
        h[a_next, b_idx] += params.t2
        h[b_idx, a_next] += params.t2

    return h


def build_ssh(params: LatticeParams, boundary: Boundary = Boundary.PBC) -> HamiltonianMatrix:
    """
    Nonreciprocal SSH chain: H[A_l, B_l] = t1 + gamma, H[B_l, A_l] = t1 - gamma,
    symmetric t2 between B_l and A_{l+1}.

    :param params: Lattice parameters.
    :param boundary: PBC keeps the B_L / A_1 wrap, OBC drops it.
    :return: 2L x 2L Hamiltonian.
    """
    _check_params(params)
    h = _chain(params, Boundary(boundary), params.forward, params.backward)
    return HamiltonianMatrix(h, params.L, boundary, Variant.NONRECIPROCAL)


def build_gain_loss_ssh(params: LatticeParams, boundary: Boundary = Boundary.PBC) -> HamiltonianMatrix:
    """
    Hermitian SSH hopping with +i delta on A sites and -i delta on B sites.

    :param params: Lattice parameters; gamma is not used.
    :param boundary: PBC or OBC.
    :return: 2L x 2L Hamiltonian.
    """
    _check_params(params)
    h = _chain(params, Boundary(boundary), params.t1, params.t1)
    h[np.arange(0, 2 * params.L, 2), np.arange(0, 2 * params.L, 2)] = 1j * params.delta
    h[np.arange(1, 2 * params.L, 2), np.arange(1, 2 * params.L, 2)] = -1j * params.delta
    return HamiltonianMatrix(h, params.L, boundary, Variant.GAIN_LOSS)


CHAIN_BUILDERS = {
    Variant.NONRECIPROCAL: build_ssh,
    Variant.GAIN_LOSS: build_gain_loss_ssh,
}


def leg_offsets(indexing: SiteIndexing, config: CouplingConfig) -> Tuple[int, int]:
    """0-based offsets of the (n, m) leg sites."""
    sub_n, sub_m = config.leg_sublattices
    return indexing.offset(config.n, sub_n), indexing.offset(config.m, sub_m)


def assemble(
    params: LatticeParams,
    config: CouplingConfig,
    boundary: Boundary = Boundary.PBC,
    variant: Variant = Variant.NONRECIPROCAL,
) -> HamiltonianMatrix:
    """
    Chain plus emitter. Atom couplings are real and stored symmetrically.

    :param params: Lattice parameters.
    :param config: Emitter kind, legs and strengths.
    :param boundary: PBC or OBC.
    :param variant: Nonreciprocal or gain/loss chain.
    :return: Hamiltonian of dimension 2L, 2L+1 or 2L+2.
    """
    chain = CHAIN_BUILDERS[Variant(variant)](params, boundary)
    if config.emitter == Emitter.NO_ATOM:
        return chain

    for name, cell in (('coupling.n', config.n), ('coupling.m', config.m)):
        if not 1 <= cell <= params.L:
            raise ConfigError(f'leg cell {cell} outside 1..{params.L}', name)

    indexing = SiteIndexing(params.L, config.n_atoms)
    h = np.zeros((indexing.dimension, indexing.dimension), dtype=complex)
    h[:2 * params.L, :2 * params.L] = chain.matrix
    leg_n, leg_m = leg_offsets(indexing, config)

    if config.emitter == Emitter.GIANT_ATOM:
        atoms = (indexing.atom_offset(1), indexing.atom_offset(1))
    else:
        atoms = (indexing.atom_offset(1), indexing.atom_offset(2))

    for atom, leg, g in ((atoms[0], leg_n, config.g_n), (atoms[1], leg_m, config.g_m)):
        h[atom, leg] += g
        h[leg, atom] += g

    logger.debug('assembled %s/%s %s emitter, dimension %d', boundary, variant, config.emitter.value, indexing.dimension)
    return HamiltonianMatrix(h, params.L, boundary, variant, config.n_atoms)


def bloch_matrix(params: LatticeParams, k: float, variant: Variant = Variant.NONRECIPROCAL) -> np.ndarray:
    """
    2x2 Bloch block in the (A, B) basis.

    :param params: Lattice parameters.
    :param k: Crystal momentum.
    :param variant: Nonreciprocal or gain/loss chain.
    :return: Complex 2x2 array.
    """
    if Variant(variant) == Variant.GAIN_LOSS:
        forward, backward, onsite = params.t1, params.t1, 1j * params.delta
    else:
        forward, backward, onsite = params.forward, params.backward, 0.0
    return np.array([
        [onsite, forward + params.t2 * np.exp(-1j * k)],
        [backward + params.t2 * np.exp(1j * k), -onsite],
    ], dtype=complex)


def translation_operator(L: int, n_atoms: int = 0) -> np.ndarray:
    """Permutation moving every chain site one cell to the right; atoms stay."""
    indexing = SiteIndexing(L, n_atoms)
    t = np.zeros((indexing.dimension, indexing.dimension))
    for cell in range(1, L + 1):
        target = cell % L + 1
        for sub in (Sublattice.A, Sublattice.B):
            t[indexing.offset(target, sub), indexing.offset(cell, sub)] = 1.0
    for k in range(1, n_atoms + 1):
        t[indexing.atom_offset(k), indexing.atom_offset(k)] = 1.0
    return t
