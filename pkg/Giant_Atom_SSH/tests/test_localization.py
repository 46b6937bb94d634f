import numpy as np
import pytest

from giantatom.config import RunConfig
from giantatom.errors import PreconditionError
from giantatom.localization import (
    beta_of_energy, beta_profile, inverse_participation, ipr, ipr_heatmap, ipr_vs_g, mean_ipr, reference_lines,
)
from giantatom.model import Boundary, CouplingConfig, Emitter, LatticeParams, assemble, build_ssh
from giantatom.spectral import StateClass, classify_states, eigendecompose


@pytest.fixture()
def params():
    return LatticeParams(L=20, t1=0.2, t2=1.0, gamma=0.5)


@pytest.fixture()
def centre_atom():
    return CouplingConfig.equal(10, 10, 1.0)


def test_inverse_participation_limits():
    vectors = np.zeros((4, 2), dtype=complex)
    vectors[2, 0] = 1.0
    vectors[:, 1] = 0.5
    values, usable = inverse_participation(vectors)
    np.testing.assert_allclose(values, [1.0, 0.25])
    assert usable.all()


def test_bare_ring_states_are_extended(params):
    report = ipr(eigendecompose(build_ssh(params)), params.L)
    assert report.state_count == 40
    assert 1.0 / (2 * params.L) - 1e-12 <= report.average <= 1.0 / params.L + 1e-12


def test_decoupled_atom_is_excluded(params, centre_atom):
    spec = eigendecompose(assemble(params, centre_atom.model_copy(update={'g_n': 0.0, 'g_m': 0.0})))
    report = ipr(spec, params.L)
    assert report.excluded == 1
    assert report.state_count == 40
    assert ipr(spec, params.L, include_atom=True).excluded == 0


def test_unknown_reduction(params):
    with pytest.raises(PreconditionError):
        ipr(eigendecompose(build_ssh(params)), params.L, reduce_option='mode')


def test_coupling_localizes(params, centre_atom):
    decoupled = mean_ipr(params, centre_atom.model_copy(update={'g_n': 0.0, 'g_m': 0.0}))
    assert mean_ipr(params, centre_atom) > decoupled


def test_unbalanced_legs_localize_more(params, centre_atom):
    balanced = mean_ipr(params, centre_atom.model_copy(update={'g_n': 13.0, 'g_m': 13.0}))
    unbalanced = mean_ipr(params, centre_atom.model_copy(update={'g_n': 1.0, 'g_m': 13.0}))
    assert unbalanced > balanced


def test_heatmap_row_order(params, centre_atom):
    rows = ipr_heatmap(params, centre_atom, [0.0, 13.0], [1.0, 13.0], threads=2)
    assert [(gm, gn) for gm, gn, _ in rows] == [(0.0, 1.0), (0.0, 13.0), (13.0, 1.0), (13.0, 13.0)]
    assert rows[2][2] == pytest.approx(mean_ipr(params, centre_atom.model_copy(update={'g_n': 1.0, 'g_m': 13.0})))


def test_small_atoms_localize_more_than_giant(params, centre_atom):
    giant = ipr_vs_g(params, centre_atom, [7.0])
    small = ipr_vs_g(params, centre_atom.model_copy(update={'emitter': Emitter.TWO_SMALL_ATOMS}), [7.0])
    assert small[0][1] > giant[0][1]


def test_beta_roots_on_periodic_ring(params):
    spec = eigendecompose(build_ssh(params))
    result = beta_profile(spec, params)
    assert len(result.rows) == 40
    for _, _, beta1, beta2 in result.rows:
        assert beta1 == pytest.approx(1.0, abs=1e-8)
        assert beta2 == pytest.approx(3.0 / 7.0, abs=1e-8)


def test_beta_product_law(params, centre_atom):
    spec = eigendecompose(assemble(params, centre_atom))
    labels = classify_states(spec, params)
    result = beta_profile(spec, params, labels, state_filter=None)
    assert len(result.rows) == len(spec)
    for _, _, beta1, beta2 in result.rows:
        assert beta1 >= beta2
        assert beta1 * beta2 == pytest.approx(3.0 / 7.0, rel=1e-8)


def test_open_chain_beta_near_reference():
    params = LatticeParams(L=40, t1=0.2, t2=1.0, gamma=0.5)
    spec = eigendecompose(build_ssh(params, Boundary.OBC))
    labels = classify_states(spec, params)
    result = beta_profile(spec, params, labels, StateClass.BULK)
    reference = reference_lines(params)['open_chain']
    assert reference == pytest.approx(np.sqrt(3.0 / 7.0))
    assert np.median([row[2] for row in result.rows]) == pytest.approx(reference, rel=0.1)
    assert np.median([row[3] for row in result.rows]) == pytest.approx(reference, rel=0.1)


def test_beta_of_energy_zero(params):
    pair = beta_of_energy(0.0, params)
    assert pair.Delta == pytest.approx(0.25 - 0.04 - 1.0)
    assert not pair.degenerate
    assert abs(pair.beta1 * pair.beta2) == pytest.approx(3.0 / 7.0)


def test_beta_of_energy_rejects_vanishing_forward_hop():
    with pytest.raises(PreconditionError):
        beta_of_energy(1.0, LatticeParams(t1=-0.5, gamma=0.5))


def test_reference_lines(params):
    lines = reference_lines(params)
    assert lines['unit'] == 1.0
    assert lines['product'] == pytest.approx(3.0 / 7.0)


def test_ipr_peaks_at_unit_coupling(params, centre_atom):
    rows = ipr_vs_g(params, centre_atom, [0.25, 0.5, 1.0, 2.0, 4.0, 7.0, 13.0], threads=2)
    best, _ = max(rows, key=lambda row: row[1])
    assert best == 1.0


def test_balanced_unit_legs_give_bipolar_bulk(params, centre_atom):
    result = beta_profile(eigendecompose(assemble(params, centre_atom)), params)
    beta1 = np.array([row[2] for row in result.rows])
    assert np.any(beta1 > 1.0 + 1e-3)
    assert np.any(beta1 < 1.0 - 1e-3)


def test_small_atoms_push_bulk_onto_open_chain_line(params, centre_atom):
    small = centre_atom.model_copy(update={'emitter': Emitter.TWO_SMALL_ATOMS, 'g_n': 7.0, 'g_m': 7.0})
    result = beta_profile(eigendecompose(assemble(params, small)), params)
    reference = reference_lines(params)['open_chain']
    assert np.median([row[2] for row in result.rows]) == pytest.approx(reference, rel=0.1)
    assert np.median([row[3] for row in result.rows]) == pytest.approx(reference, rel=0.1)


def test_beta_roots_solve_their_quadratic():
    rng = np.random.default_rng(RunConfig().seed)
    draws = 0
    while draws < 1000:
        t1, gamma = rng.uniform(-2.0, 2.0), rng.uniform(-1.5, 1.5)
        if abs(t1 + gamma) < 1e-3:
            continue
        t2 = rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0)
        params = LatticeParams(L=10, t1=t1, t2=t2, gamma=gamma)
        E = complex(rng.uniform(-3.0, 3.0), rng.uniform(-1.0, 1.0))
        Delta = E * E + gamma ** 2 - t1 ** 2 - t2 ** 2
        pair = beta_of_energy(E, params)
        assert abs(pair.Delta - Delta) <= 1e-12 * max(1.0, abs(Delta))
        for beta in (pair.beta1, pair.beta2):
            terms = (t2 * (t1 + gamma) * beta * beta, Delta * beta, t2 * (t1 - gamma))
            residual = abs(terms[0] - terms[1] + terms[2])
            assert residual <= 1e-10 * sum(abs(term) for term in terms)
        assert abs(pair.beta1) >= abs(pair.beta2)
        draws += 1
