import json
import os

import pytest

from giantatom.cli import figure, main
from giantatom.writers import read_rows, sha256_file

FIG2 = ['--set', 'coupling.n=25', '--set', 'coupling.m=26']


@pytest.fixture()
def out_dir(tmp_path):
    return str(tmp_path / 'out')


def load_manifest(path):
    with open(os.path.join(path, 'manifest.json')) as d:
        return json.load(d)


def test_spectrum(out_dir):
    assert main(['spectrum', '--out', out_dir] + FIG2) == 0
    rows = read_rows(os.path.join(out_dir, 'spectrum.csv'))
    assert len(rows) == 101
    assert {row[3] for row in rows} <= {'Bulk', 'UpperBound', 'LowerBound', 'GapMode'}

    manifest = load_manifest(out_dir)
    assert manifest['status'] == 'ok'
    assert manifest['files'][0]['name'] == 'spectrum.csv'
    assert manifest['files'][0]['sha256'] == sha256_file(os.path.join(out_dir, 'spectrum.csv'))
    with open(os.path.join(out_dir, 'spectrum.csv')) as d:
        assert d.readline().strip() == f"# config_sha256={manifest['config_sha256']}"
    assert not os.path.exists(os.path.join(out_dir, 'manifest.json.tmp'))
    assert not os.path.exists(os.path.join(out_dir, 'spectrum.csv.tmp'))
    assert manifest['extras']['runs'][0]['dispersion_branch'] == 'principal'


def test_runs_are_deterministic(tmp_path):
    first, second = str(tmp_path / 'a'), str(tmp_path / 'b')
    assert main(['spectrum', '--out', first] + FIG2) == 0
    assert main(['spectrum', '--out', second] + FIG2) == 0
    with open(os.path.join(first, 'spectrum.csv'), 'rb') as a, open(os.path.join(second, 'spectrum.csv'), 'rb') as b:
        assert a.read() == b.read()


def test_zeromode_outside_window(out_dir):
    code = main(['zeromode', '--out', out_dir, '--set', 'lattice.t1=0.8'] + FIG2)
    assert code == 4
    assert read_rows(os.path.join(out_dir, 'zeromode.csv')) == []
    manifest = load_manifest(out_dir)
    assert manifest['status'] == 'no gap mode found'
    assert manifest['exit_code'] == 4


def test_zeromode_inside_window(out_dir):
    args = ['--set', 'coupling.n=20', '--set', 'coupling.m=40', '--set', 'options.zero_tol=0.01']
    assert main(['zeromode', '--out', out_dir] + args) == 0
    rows = read_rows(os.path.join(out_dir, 'zeromode.csv'))
    assert len(rows) == 101
    assert rows[-1][5] != ''
    states = load_manifest(out_dir)['extras']['runs'][0]['states']
    assert states[0]['fidelity'] >= 0.999


def test_boundstates(out_dir):
    args = ['--set', 'coupling.g_n=3.0', '--set', 'coupling.g_m=3.0', '--set', 'coupling.n=20', '--set', 'coupling.m=30']
    assert main(['boundstates', '--out', out_dir] + args) == 0
    rows = read_rows(os.path.join(out_dir, 'boundstates.csv'))
    upper = [row for row in rows if row[3] == 'UpperBound']
    assert upper
    assert float(upper[0][4]) < 1e-8
    assert float(upper[0][5]) >= 0.999


def test_ipr_heatmap_grid(out_dir):
    args = ['--set', 'lattice.L=20', '--set', 'coupling.n=10', '--set', 'coupling.m=10', '--threads', '2']
    assert main(['ipr-heatmap', '--out', out_dir] + args) == 0
    rows = read_rows(os.path.join(out_dir, 'ipr_heatmap.csv'))
    assert len(rows) == 196
    assert rows[0][:2] == ['0', '0']
    assert rows[1][:2] == ['0', '1']


def test_winding_marks_gapless_points(out_dir):
    assert main(['winding', '--out', out_dir]) == 0
    rows = read_rows(os.path.join(out_dir, 'winding.csv'))
    assert len(rows) == 21
    notes = {round(float(row[0]), 6): row[4] for row in rows}
    assert notes[0.5] == 'gapless'
    assert notes[0.0] == 'gapped'


def test_lyapunov_both_channels(out_dir):
    args = [
        '--set', 'lattice.L=101', '--set', 'lattice.t1=0.6', '--set', 'lattice.gamma=1.0',
        '--set', 'options.t_obs=20',
    ]
    assert main(['lyapunov', '--out', out_dir] + args) == 0
    rows = read_rows(os.path.join(out_dir, 'lyapunov.csv'))
    assert len(rows) == 162
    assert {row[2] for row in rows} == {'A', 'B'}


def test_lyapunov_needs_odd_ring(out_dir):
    assert main(['lyapunov', '--out', out_dir]) == 4


def test_bad_override_exits_with_config_error(out_dir):
    assert main(['spectrum', '--out', out_dir, '--set', 'lattice.L=1']) == 2
    assert main(['spectrum', '--out', out_dir, '--set', 'lattice.nope=1']) == 2


def test_bad_config_file(tmp_path, out_dir):
    path = tmp_path / 'run.json'
    path.write_text('{"schema_version": 7}')
    assert main(['spectrum', '--config', str(path), '--out', out_dir]) == 2


def test_figure_two_writes_six_tables(out_dir):
    manifest = figure('fig2', out_dir, threads=2)
    names = sorted(record.name for record in manifest.files)
    assert len(names) == 6
    assert names[0] == 'fig2_AA_sweep_abs.csv'
    assert len(read_rows(os.path.join(out_dir, 'fig2_AB_sweep_re.csv'))) == 81 * 101
    assert os.path.exists(os.path.join(out_dir, 'manifest.json'))
