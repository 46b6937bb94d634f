from giantatom import CouplingConfig, LatticeParams, LegMode, StateClass, assemble, classify_states, eigendecompose
from giantatom.analytic_bound import fidelity, leg_weights, profile

params = LatticeParams(L=50, t1=0.2, t2=1.0, gamma=0.5)
coupling = CouplingConfig.equal(20, 40, 1.0, LegMode.AB)

spec = eigendecompose(assemble(params, coupling))
labels = classify_states(spec, params)

exact = profile(params, coupling, 'zero').flat_vector(normalize=True)

for q in labels.indices(StateClass.GAP_MODE):
    psi = spec.state(q)
    print("E =", spec.eigenvalues[q])
    print("fidelity with closed form:", fidelity(exact, psi))
    print("weight near legs (n, m):", leg_weights(psi, params.L, coupling))
