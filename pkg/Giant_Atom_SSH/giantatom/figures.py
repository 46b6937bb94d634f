"""Preset runs that regenerate the data behind each figure panel."""
from typing import List, Tuple

from giantatom.config import Grid, RunConfig, Task, TaskOptions
from giantatom.model import Boundary, CouplingConfig, Emitter, LatticeParams, LegMode, Variant

SWEEP_GRID = Grid(start=-2.0, stop=2.0, points=81)
# A-B zero modes on a 50-cell ring sit at |E| ~ 1e-5, not at machine zero
PROFILE_OPTIONS = TaskOptions(zero_tol=1e-2)


def _fig2() -> List[Tuple[str, RunConfig]]:
    lattice = LatticeParams(L=50, t1=0.2, t2=1.0, gamma=0.5)
    runs = []
    for mode in (LegMode.AB, LegMode.AA):
        runs.append((f'fig2_{mode.value}_', RunConfig(
            task=Task.SWEEP,
            lattice=lattice,
            coupling=CouplingConfig.equal(25, 26, 1.0, mode),
            options=TaskOptions(t1_grid=SWEEP_GRID),
        )))
    return runs


def _profiles(name: str, mode: LegMode, t1_values, emitter: Emitter = Emitter.GIANT_ATOM) -> List[Tuple[str, RunConfig]]:
    runs = []
    for t1 in t1_values:
        lattice = LatticeParams(L=50, t1=t1, t2=1.0, gamma=0.5)
        coupling = CouplingConfig.equal(20, 40, 1.0, mode, emitter)
        tag = f'{name}_{mode.value}_t1_{t1:+g}_'
        runs.append((tag + 'zero_', RunConfig(task=Task.ZEROMODE, lattice=lattice, coupling=coupling, options=PROFILE_OPTIONS)))
        if emitter == Emitter.GIANT_ATOM:
            runs.append((tag + 'bound_', RunConfig(task=Task.BOUNDSTATES, lattice=lattice, coupling=coupling, options=PROFILE_OPTIONS)))
    return runs


def _fig3():
    return _profiles('fig3', LegMode.AB, (0.2, -0.2))


def _fig4():
    return _profiles('fig4', LegMode.AA, (0.2, 1.6))


def _fig5():
    return (
        _profiles('fig5', LegMode.AB, (0.2,), Emitter.TWO_SMALL_ATOMS)
        + _profiles('fig5', LegMode.AA, (0.2,), Emitter.TWO_SMALL_ATOMS)
    )


FIG67_LATTICE = LatticeParams(L=20, t1=0.2, t2=1.0, gamma=0.5)


def _fig6():
    runs = [('fig6_', RunConfig(
        task=Task.IPR_HEATMAP,
        lattice=FIG67_LATTICE,
        coupling=CouplingConfig.equal(10, 10, 1.0),
    ))]
    for gm, gn in ((0, 0), (1, 1), (13, 13), (13, 1)):
        runs.append((f'fig6_beta_{gm}_{gn}_', RunConfig(
            task=Task.BETA_PROFILE,
            lattice=FIG67_LATTICE,
            coupling=CouplingConfig(n=10, m=10, g_m=float(gm), g_n=float(gn)),
        )))
    return runs


def _fig7():
    return [
        ('fig7_', RunConfig(task=Task.IPR_VS_G, lattice=FIG67_LATTICE, coupling=CouplingConfig.equal(10, 10, 1.0))),
        ('fig7_beta_small_g7_', RunConfig(
            task=Task.BETA_PROFILE,
            lattice=FIG67_LATTICE,
            coupling=CouplingConfig.equal(10, 10, 7.0, emitter=Emitter.TWO_SMALL_ATOMS),
        )),
    ]


def _fig8():
    coupling = CouplingConfig.equal(1, 1, 1.0)
    model1 = LatticeParams(L=401, t1=0.6, t2=1.0, gamma=1.0)
    model2 = LatticeParams(L=401, t1=0.6, t2=1.0, gamma=0.0, delta=1.0)
    return [
        ('fig8_model1_', RunConfig(
            task=Task.LYAPUNOV, lattice=model1, coupling=coupling, options=TaskOptions(model_tag='model1'),
        )),
        ('fig8_model2_', RunConfig(
            task=Task.LYAPUNOV, lattice=model2, coupling=coupling, variant=Variant.GAIN_LOSS,
            boundary=Boundary.PBC, options=TaskOptions(model_tag='model2'),
        )),
    ]


FIGURES = {
    'fig2': _fig2,
    'fig3': _fig3,
    'fig4': _fig4,
    'fig5': _fig5,
    'fig6': _fig6,
    'fig7': _fig7,
    'fig8': _fig8,
}


def figure_runs(name: str) -> List[Tuple[str, RunConfig]]:
    return FIGURES[name]()
