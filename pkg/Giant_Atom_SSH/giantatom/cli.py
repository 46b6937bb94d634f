"""
Experiment driver: resolves a RunConfig, dispatches the task, writes CSVs and the manifest.
"""
import argparse
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, NamedTuple, Optional, Sequence

import numpy as np
from dotenv import load_dotenv

from giantatom import __version__
from giantatom.analytic_bound import fidelity, leg_weights, profile
from giantatom.config import (
    RunConfig, Task, apply_overrides, load_config, resolve_log_level, resolve_threads, with_updates,
)
from giantatom.dynamics import EvolutionConfig, Stepper, lyapunov_channels
from giantatom.errors import GiantAtomError, PreconditionError
from giantatom.figures import FIGURES, figure_runs
from giantatom.localization import beta_profile, ipr, ipr_heatmap, ipr_vs_g
from giantatom.model import Emitter, assemble
from giantatom.spectral import (
    DISPERSION_BRANCH, SELFENERGY_MAP, StateClass, classify_states, count_complex, eigendecompose, winding_number,
)
from giantatom.writers import ResultManifest, sha256_file, sha256_text, write_csv, write_manifest

logger = logging.getLogger(__name__)

NO_GAP_MODE = 'no gap mode found'


class TaskResult(NamedTuple):
    files: List[str]
    status: str = 'ok'
    exit_code: int = 0
    extras: Dict[str, Any] = {}


class _Context(NamedTuple):
    config: RunConfig
    out_dir: str
    prefix: str
    threads: int
    sha: str

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, f'{self.prefix}{name}.csv')


def _decompose(config: RunConfig):
    H = assemble(config.lattice, config.coupling, config.boundary, config.variant)
    spec = eigendecompose(H)
    labels = classify_states(
        spec, config.lattice, config.options.margin, config.options.hull_samples, config.variant,
    )
    return H, spec, labels


def _site_rows(q: int, psi: np.ndarray, reference: Optional[np.ndarray] = None):
    for N, value in enumerate(psi, start=1):
        if reference is None:
            yield q, N, value.real, value.imag, abs(value) ** 2, None, None, None
        else:
            ref = reference[N - 1]
            yield q, N, value.real, value.imag, abs(value) ** 2, ref.real, ref.imag, abs(ref) ** 2


PROFILE_HEADER = ['state', 'N', 're', 'im', 'abs2', 'analytic_re', 'analytic_im', 'analytic_abs2']


def _analytic(config: RunConfig, label: StateClass, energy: complex) -> Optional[np.ndarray]:
    """Unit-norm closed-form vector for a labelled state, or None where no closed form applies."""
    if config.coupling.emitter != Emitter.GIANT_ATOM:
        return None
    try:
        if label == StateClass.GAP_MODE and abs(energy) <= config.options.zero_tol:
            shape = profile(config.lattice, config.coupling, 'zero')
        else:
            shape = profile(config.lattice, config.coupling, 'bound', energy)
    except PreconditionError as e:
        logger.info('no closed form for %s at E = %s: %s', label.value, energy, e)
        return None
    return shape.flat_vector(normalize=True)


def _aligned(psi: np.ndarray, reference: np.ndarray) -> np.ndarray:
    psi = psi / np.linalg.norm(psi)
    overlap = np.vdot(reference, psi)
    if abs(overlap) > 0:
        psi = psi * (abs(overlap) / overlap)
    return psi


def _spectrum(ctx: _Context) -> TaskResult:
    config = ctx.config
    _, spec, labels = _decompose(config)
    report = ipr(spec, config.lattice.L)
    rows = [
        (q, e.real, e.imag, labels[q], report.per_state[q])
        for q, e in enumerate(spec.eigenvalues)
    ]
    path = write_csv(ctx.path('spectrum'), ['index', 're', 'im', 'class', 'ipr'], rows, ctx.sha)
    extras = {
        'counts': {k.value: v for k, v in labels.counts.items()},
        'ambiguous': labels.ambiguous,
        'ipr_average': report.average,
        'max_residual': spec.max_residual,
        'dispersion_branch': DISPERSION_BRANCH,
    }
    return TaskResult([path], extras=extras)


def _boundstates(ctx: _Context) -> TaskResult:
    config = ctx.config
    _, spec, labels = _decompose(config)
    selected = [q for q, label in enumerate(labels) if label != StateClass.BULK]

    summary = []
    profiles = []
    for q in selected:
        energy = spec.eigenvalues[q]
        residual = None
        if config.coupling.emitter == Emitter.GIANT_ATOM:
            try:
                residual = abs(energy - SELFENERGY_MAP[config.coupling.mode](energy, config.lattice, config.coupling))
            except PreconditionError as e:
                logger.info('residual skipped for state %d: %s', q, e)
        reference = _analytic(config, labels[q], energy)
        psi = spec.state(q)
        score = None
        if reference is not None:
            score = fidelity(reference, psi)
            psi = _aligned(psi, reference)
        summary.append((q, energy.real, energy.imag, labels[q], residual, score))
        profiles.extend(_site_rows(q, psi, reference))

    files = [
        write_csv(
            ctx.path('boundstates'), ['state', 're', 'im', 'class', 'residual', 'fidelity'], summary, ctx.sha,
        ),
        write_csv(ctx.path('boundstates_profiles'), PROFILE_HEADER, profiles, ctx.sha),
    ]
    return TaskResult(files, extras={'states': len(selected)})


def _zeromode(ctx: _Context) -> TaskResult:
    config = ctx.config
    _, spec, labels = _decompose(config)
    candidates = [
        q for q in labels.indices(StateClass.GAP_MODE)
        if abs(spec.eigenvalues[q]) <= config.options.zero_tol
    ]
    candidates.sort(key=lambda q: abs(spec.eigenvalues[q]))

    rows = []
    extras = {'states': []}
    for q in candidates:
        energy = spec.eigenvalues[q]
        reference = _analytic(config, StateClass.GAP_MODE, energy)
        psi = spec.state(q)
        record = {'state': q, 're': energy.real, 'im': energy.imag}
        if reference is not None:
            record['fidelity'] = fidelity(reference, psi)
            psi = _aligned(psi, reference)
        if config.coupling.emitter != Emitter.NO_ATOM:
            record['leg_weights'] = list(leg_weights(psi, config.lattice.L, config.coupling))
        extras['states'].append(record)
        rows.extend(_site_rows(q, psi, reference))

    path = write_csv(ctx.path('zeromode'), PROFILE_HEADER, rows, ctx.sha)
    if not candidates:
        logger.warning('no gap mode with |E| <= %g', config.options.zero_tol)
        return TaskResult([path], NO_GAP_MODE, PreconditionError.exit_code, extras)
    return TaskResult([path], extras=extras)


def _ipr_heatmap(ctx: _Context) -> TaskResult:
    config = ctx.config
    rows = ipr_heatmap(
        config.lattice, config.coupling,
        config.options.gm_grid.values(), config.options.gn_grid.values(),
        config.boundary, ctx.threads,
    )
    return TaskResult([write_csv(ctx.path('ipr_heatmap'), ['g_m', 'g_n', 'ipr'], rows, ctx.sha)])


def _ipr_vs_g(ctx: _Context) -> TaskResult:
    config = ctx.config
    rows = []
    for emitter in (Emitter.GIANT_ATOM, Emitter.TWO_SMALL_ATOMS):
        coupling = config.coupling.model_copy(update={'emitter': emitter})
        for g, value in ipr_vs_g(config.lattice, coupling, config.options.g_values, config.boundary, ctx.threads):
            rows.append((g, emitter, value))
    return TaskResult([write_csv(ctx.path('ipr_vs_g'), ['g', 'emitter', 'ipr'], rows, ctx.sha)])


def _beta_profile(ctx: _Context) -> TaskResult:
    config = ctx.config
    _, spec, labels = _decompose(config)
    result = beta_profile(spec, config.lattice, labels)
    rows = [(q, e.real, e.imag, b1, b2) for q, e, b1, b2 in result.rows]
    files = [
        write_csv(ctx.path('beta_profile'), ['q', 're', 'im', 'beta1', 'beta2'], rows, ctx.sha),
        write_csv(ctx.path('beta_reference'), ['line', 'value'], sorted(result.reference.items()), ctx.sha),
    ]
    return TaskResult(files, extras={'reference': result.reference})


def _winding(ctx: _Context) -> TaskResult:
    config = ctx.config
    rows = []
    for t1 in config.options.t1_grid.values():
        params = config.lattice.model_copy(update={'t1': float(t1)})
        try:
            result = winding_number(params, config.options.winding_samples)
            rows.append((float(t1), result.raw, result.rounded, result.laps, 'gapped'))
        except PreconditionError:
            rows.append((float(t1), None, None, None, 'gapless'))
    path = write_csv(ctx.path('winding'), ['t1', 'raw', 'rounded', 'laps', 'note'], rows, ctx.sha)
    return TaskResult([path])


def _lyapunov(ctx: _Context) -> TaskResult:
    config = ctx.config
    options = config.options
    H = assemble(config.lattice, config.coupling, config.boundary, config.variant)
    evolution = EvolutionConfig(t_final=options.t_obs, stepper=Stepper(options.stepper), rtol=options.rtol, atol=options.atol)
    curves = lyapunov_channels(
        H, options.v_grid.values(), options.t_obs, config.coupling, evolution, model_tag=options.model_tag,
    )
    rows = [
        (v, lam, curve.channel, curve.model_tag, floored)
        for curve in curves
        for v, lam, floored in zip(curve.v_grid, curve.lam, curve.floored)
    ]
    path = write_csv(ctx.path('lyapunov'), ['v', 'lambda', 'channel', 'model_tag', 'floored'], rows, ctx.sha)
    extras = {f'argmax_v_{curve.channel}': curve.argmax_velocity() for curve in curves}
    return TaskResult([path], extras=extras)


def _sweep(ctx: _Context) -> TaskResult:
    config = ctx.config
    t1_values = [float(t1) for t1 in config.options.t1_grid.values()]

    def solve(t1: float) -> np.ndarray:
        params = config.lattice.model_copy(update={'t1': t1})
        return eigendecompose(assemble(params, config.coupling, config.boundary, config.variant)).eigenvalues

    with ThreadPoolExecutor(max_workers=ctx.threads) as executor:
        spectra = list(executor.map(solve, t1_values))

    files = []
    for name, part in (('re', np.real), ('im', np.imag), ('abs', np.abs)):
        rows = [(t1, q, value) for t1, values in zip(t1_values, spectra) for q, value in enumerate(part(values))]
        files.append(write_csv(ctx.path(f'sweep_{name}'), ['t1', 'q', 'value'], rows, ctx.sha))
    extras = {'complex_counts': [count_complex(values) for values in spectra]}
    return TaskResult(files, extras=extras)


TASKS = {
    Task.SPECTRUM: _spectrum,
    Task.BOUNDSTATES: _boundstates,
    Task.ZEROMODE: _zeromode,
    Task.IPR_HEATMAP: _ipr_heatmap,
    Task.IPR_VS_G: _ipr_vs_g,
    Task.BETA_PROFILE: _beta_profile,
    Task.WINDING: _winding,
    Task.LYAPUNOV: _lyapunov,
    Task.SWEEP: _sweep,
}


def _manifest(
    snapshot: Dict[str, Any], sha: str, started: float, results: Sequence[TaskResult], out_dir: str,
) -> ResultManifest:
    files = [name for result in results for name in result.files]
    failed = [result for result in results if result.exit_code]
    manifest = ResultManifest(
        config=snapshot,
        config_sha256=sha,
        tool_version=__version__,
        wall_time=time.perf_counter() - started,
        status=failed[0].status if failed else 'ok',
        exit_code=failed[0].exit_code if failed else 0,
        files=[{'name': os.path.basename(path), 'sha256': sha256_file(path)} for path in files],
        extras={'runs': [result.extras for result in results]},
    )
    write_manifest(out_dir, manifest)
    logger.info('wrote %d files and manifest to %s', len(files), out_dir)
    return manifest


def run(config: RunConfig, out_dir: Optional[str] = None, threads: Optional[int] = None) -> ResultManifest:
    """
    Executes one configured task and writes its artifacts followed by manifest.json.

    :param config: Resolved run configuration.
    :param out_dir: Output directory, config.output_dir when omitted.
    :param threads: Worker count for sweeps.
    :return: The manifest that was written.
    """
    started = time.perf_counter()
    out_dir = out_dir or config.output_dir
    os.makedirs(out_dir, exist_ok=True)
    sha = sha256_text(config.canonical_json())
    logger.info('running %s into %s', config.task.value, out_dir)

    result = TASKS[config.task](_Context(config, out_dir, '', resolve_threads(threads), sha))
    return _manifest(config.model_dump(mode='json'), sha, started, [result], out_dir)


def figure(name: str, out_dir: str, threads: Optional[int] = None) -> ResultManifest:
    """
    Runs every preset behind a figure into one directory with one manifest.

    :param name: fig2 .. fig8.
    :param out_dir: Output directory.
    :param threads: Worker count for sweeps.
    :return: The manifest that was written.
    """
    if name not in FIGURES:
        raise PreconditionError(f'unknown figure {name}, expected one of {sorted(FIGURES)}')
    started = time.perf_counter()
    os.makedirs(out_dir, exist_ok=True)
    threads = resolve_threads(threads)

    runs = figure_runs(name)
    snapshot = {'figure': name, 'runs': {prefix: config.model_dump(mode='json') for prefix, config in runs}}
    results = []
    for prefix, config in runs:
        sha = sha256_text(config.canonical_json())
        logger.info('figure %s: %s%s', name, prefix, config.task.value)
        results.append(TASKS[config.task](_Context(config, out_dir, prefix, threads, sha)))

    figure_sha = sha256_text(str(sorted((p, sha256_text(c.canonical_json())) for p, c in runs)))
    return _manifest(snapshot, figure_sha, started, results, out_dir)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', dest='config', default=None, help='Path of a JSON run config')
    common.add_argument('--out', dest='out', default=None, help='Output directory')
    common.add_argument('--set', dest='overrides', action='append', default=[], help='Override, e.g. lattice.t1=0.3')
    common.add_argument('--threads', dest='threads', type=int, default=None, help='Worker count for sweeps')
    common.add_argument('--log-level', dest='log_level', default=None, help='DEBUG, INFO, WARNING or ERROR')

    parser = argparse.ArgumentParser(prog='giantatom', description='Giant atom on a nonreciprocal SSH ring')
    commands = parser.add_subparsers(dest='command', required=True)
    for task in Task:
        commands.add_parser(task.value, parents=[common], help=f'Run the {task.value} task')
    fig = commands.add_parser('figure', parents=[common], help='Regenerate the data of a figure')
    fig.add_argument('name', choices=sorted(FIGURES))
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Command line entry point.

    :param argv: Arguments without the program name.
    :return: Exit status: 0 success, 2 config error, 3 numerical failure, 4 precondition violation.
    """
    load_dotenv()
    args = _build_parser().parse_args(argv)

    try:
        logging.basicConfig(
            level=resolve_log_level(args.log_level),
            format='%(asctime)s %(name)s %(levelname)s %(message)s',
        )
        if args.command == 'figure':
            manifest = figure(args.name, args.out or os.path.join('out', args.name), args.threads)
        else:
            config = load_config(args.config) if args.config else RunConfig()
            config = with_updates(config, task=args.command)
            config = apply_overrides(config, args.overrides)
            manifest = run(config, args.out, args.threads)
    except GiantAtomError as e:
        logger.error('%s: %s', type(e).__name__, e)
        return e.exit_code

    if manifest.exit_code:
        logger.error(manifest.status)
    return manifest.exit_code
