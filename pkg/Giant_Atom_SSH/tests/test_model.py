import numpy as np
import pytest
from pydantic import ValidationError

from giantatom.config import RunConfig
from giantatom.errors import ConfigError
from giantatom.model import (
    Boundary, CouplingConfig, Emitter, HamiltonianMatrix, LatticeParams, LegMode, SiteIndexing, Variant,
    assemble, bloch_matrix, build_gain_loss_ssh, build_ssh, translation_operator,
)


@pytest.fixture()
def params():
    return LatticeParams(L=6, t1=0.2, t2=1.0, gamma=0.5)


@pytest.fixture()
def indexing():
    return SiteIndexing(6, 1)


def test_site_index_convention(indexing):
    assert indexing.site_index(1, 'A') == 1
    assert indexing.site_index(1, 'B') == 2
    assert indexing.site_index(6, 'B') == 12
    assert indexing.atom_index() == 13
    assert indexing.cell_of(7) == ('A', 4)
    assert indexing.cell_of(13) == ('atom', 1)


def test_site_index_out_of_range(indexing):
    with pytest.raises(ConfigError):
        indexing.site_index(7, 'A')
    with pytest.raises(ConfigError):
        indexing.atom_index(2)


def test_cell_distance_wraps(indexing):
    assert indexing.cell_distance(1, 6) == 1
    assert indexing.cell_distance(2, 5) == 3


def test_intracell_hoppings_are_nonreciprocal(params):
    h = build_ssh(params).matrix
    idx = SiteIndexing(params.L)
    for cell in range(1, params.L + 1):
        a, b = idx.offset(cell, 'A'), idx.offset(cell, 'B')
        assert h[a, b] == pytest.approx(0.7)
        assert h[b, a] == pytest.approx(-0.3)


def test_intercell_hopping_and_wrap(params):
    idx = SiteIndexing(params.L)
    pbc = build_ssh(params, Boundary.PBC).matrix
    obc = build_ssh(params, Boundary.OBC).matrix
    b_last, a_first = idx.offset(params.L, 'B'), idx.offset(1, 'A')
    assert pbc[b_last, a_first] == 1.0
    assert pbc[a_first, b_last] == 1.0
    assert obc[b_last, a_first] == 0.0
    assert obc[idx.offset(2, 'A'), idx.offset(1, 'B')] == 1.0


def test_hermitian_when_gamma_vanishes(params):
    h = build_ssh(params.model_copy(update={'gamma': 0.0}))
    assert h.is_hermitian()
    assert not build_ssh(params).is_hermitian()


def test_gain_loss_onsite_terms(params):
    h = build_gain_loss_ssh(params.model_copy(update={'delta': 0.3})).matrix
    assert h[0, 0] == pytest.approx(0.3j)
    assert h[1, 1] == pytest.approx(-0.3j)
    assert h[0, 1] == pytest.approx(0.2)
    assert h[1, 0] == pytest.approx(0.2)


def test_assemble_dimensions(params):
    giant = CouplingConfig.equal(2, 4, 1.0)
    small = CouplingConfig.equal(2, 4, 1.0, emitter=Emitter.TWO_SMALL_ATOMS)
    assert assemble(params, giant).dimension == 13
    assert assemble(params, small).dimension == 14
    assert assemble(params, CouplingConfig.none()).dimension == 12


def test_giant_atom_couplings_are_symmetric(params):
    config = CouplingConfig(n=2, m=4, g_n=0.5, g_m=1.5)
    h = assemble(params, config).matrix
    idx = SiteIndexing(params.L, 1)
    atom = idx.atom_offset()
    assert h[atom, idx.offset(2, 'A')] == 0.5
    assert h[idx.offset(2, 'A'), atom] == 0.5
    assert h[atom, idx.offset(4, 'B')] == 1.5
    assert h[idx.offset(4, 'B'), atom] == 1.5
    assert h[atom, atom] == 0.0


def test_aa_legs_on_same_cell_add(params):
    h = assemble(params, CouplingConfig.equal(3, 3, 1.0, LegMode.AA)).matrix
    idx = SiteIndexing(params.L, 1)
    assert h[idx.atom_offset(), idx.offset(3, 'A')] == 2.0


def test_two_small_atoms_split_the_atom_row(params):
    giant = assemble(params, CouplingConfig.equal(2, 4, 1.0)).matrix
    small = assemble(params, CouplingConfig.equal(2, 4, 1.0, emitter=Emitter.TWO_SMALL_ATOMS)).matrix
    chain = 2 * params.L
    np.testing.assert_array_equal(giant[:chain, :chain], small[:chain, :chain])
    np.testing.assert_array_equal(giant[chain, :chain], small[chain, :chain] + small[chain + 1, :chain])


def test_legs_must_be_ordered():
    with pytest.raises(ValidationError):
        CouplingConfig(n=5, m=3)


def test_leg_outside_ring_rejected(params):
    with pytest.raises(ConfigError, match='coupling.m'):
        assemble(params, CouplingConfig.equal(2, 9, 1.0))


def test_zero_t2_rejected():
    with pytest.raises(ValidationError):
        LatticeParams(t2=0.0)


def test_matrix_is_read_only(params):
    h = assemble(params, CouplingConfig.equal(2, 4, 1.0))
    with pytest.raises(ValueError):
        h.matrix[0, 0] = 1.0


def test_json_dump_restores_matrix(params):
    h = assemble(params, CouplingConfig.equal(2, 4, 1.0), Boundary.OBC)
    restored = HamiltonianMatrix.from_json(h.to_json())
    np.testing.assert_array_equal(restored.matrix, h.matrix)
    assert restored.boundary == Boundary.OBC
    assert restored.n_atoms == 1


def test_translation_commutes_with_ring(params):
    h = build_ssh(params).matrix
    t = translation_operator(params.L)
    np.testing.assert_allclose(t @ h, h @ t, atol=1e-14)


def test_translation_breaks_with_atom(params):
    h = assemble(params, CouplingConfig.equal(2, 4, 1.0)).matrix
    t = translation_operator(params.L, 1)
    assert np.max(np.abs(t @ h - h @ t)) > 0.5


def test_ring_spectrum_from_bloch_blocks(params):
    eigenvalues = np.linalg.eigvals(build_ssh(params).matrix)
    for j in range(params.L):
        k = 2.0 * np.pi * j / params.L
        for value in np.linalg.eigvals(bloch_matrix(params, k)):
            assert np.min(np.abs(eigenvalues - value)) < 1e-8


def test_gain_loss_bloch_block(params):
    block = bloch_matrix(params.model_copy(update={'delta': 0.4}), 0.0, Variant.GAIN_LOSS)
    assert block[0, 0] == pytest.approx(0.4j)
    assert block[1, 1] == pytest.approx(-0.4j)
    assert block[0, 1] == pytest.approx(1.2)


def test_random_couplings_keep_the_hopping_pattern():
    rng = np.random.default_rng(RunConfig().seed)
    for _ in range(20):
        t1, gamma = rng.uniform(-2.0, 2.0, size=2)
        params = LatticeParams(L=5, t1=t1, t2=1.0, gamma=gamma)
        h = assemble(params, CouplingConfig.equal(2, 4, rng.uniform(0.1, 3.0))).matrix
        chain = h[:10, :10]
        np.testing.assert_allclose(np.triu(chain, 1) - np.tril(chain, -1).T, np.diag(np.tile([2 * gamma, 0.0], 5)[:9], 1))
        np.testing.assert_array_equal(h[-1, :], h[:, -1])


def reference_hamiltonian(params, coupling, boundary):
    L, forward, backward = params.L, params.t1 + params.gamma, params.t1 - params.gamma
    h = np.zeros((2 * L + 1, 2 * L + 1), dtype=complex)
    A = lambda l: 2 * (l - 1)
    B = lambda l: 2 * (l - 1) + 1
    for l in range(1, L + 1):
        h[A(l), B(l)] = forward
        h[B(l), A(l)] = backward
    for l in range(1, L):
        h[B(l), A(l + 1)] = params.t2
        h[A(l + 1), B(l)] = params.t2
    if boundary == Boundary.PBC:
        h[B(L), A(1)] += params.t2
        h[A(1), B(L)] += params.t2
    second = B(coupling.m) if coupling.mode == LegMode.AB else A(coupling.m)
    for leg, g in ((A(coupling.n), coupling.g_n), (second, coupling.g_m)):
        h[2 * L, leg] += g
        h[leg, 2 * L] += g
    return h


@pytest.mark.parametrize('boundary', [Boundary.PBC, Boundary.OBC])
@pytest.mark.parametrize('mode', [LegMode.AB, LegMode.AA])
def test_small_rings_match_entrywise_construction(boundary, mode):
    rng = np.random.default_rng(RunConfig().seed)
    for L in range(2, 7):
        params = LatticeParams(L=L, t1=rng.uniform(-2.0, 2.0), t2=rng.uniform(0.5, 2.0), gamma=rng.uniform(-1.0, 1.0))
        n, m = sorted(rng.integers(1, L + 1, size=2))
        coupling = CouplingConfig(mode=mode, n=int(n), m=int(m), g_n=rng.uniform(0.1, 3.0), g_m=rng.uniform(0.1, 3.0))
        expected = reference_hamiltonian(params, coupling, boundary)
        np.testing.assert_allclose(assemble(params, coupling, boundary).matrix, expected, rtol=0, atol=1e-15)


def test_gain_loss_chain_is_traceless(params):
    for delta in (0.3, 1.0, -2.0):
        h = build_gain_loss_ssh(params.model_copy(update={'delta': delta}))
        assert abs(np.trace(h.matrix)) < 1e-15


def test_gain_loss_without_delta_is_hermitian_ssh(params):
    plain = build_ssh(params.model_copy(update={'gamma': 0.0}))
    gain_loss = build_gain_loss_ssh(params.model_copy(update={'delta': 0.0}))
    np.testing.assert_array_equal(gain_loss.matrix, plain.matrix)
