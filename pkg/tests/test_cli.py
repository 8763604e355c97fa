import io
import json

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from src import catalog, export
from src.cli import EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from src.linalg import RngStream, sample_cue


@pytest.fixture
def out(tmp_path):
    return tmp_path / 'out'


def run(out, *argv):
    return main(['--out-dir', str(out), *argv])


def test_catalog_writes_matrix_and_run_config(out, capsys):
    assert run(out, 'catalog', 'P9') == EXIT_OK
    assert capsys.readouterr().out.startswith('9 9\n')
    assert_array_equal(export.read_matrix(out / 'P9.txt'), catalog.named_gate('P9'))

    config = json.loads((out / 'run_config.json').read_text())
    assert config['command'] == 'catalog'
    assert config['params']['argv'] == ['--out-dir', str(out), 'catalog', 'P9']


def test_catalog_list(out, capsys):
    assert run(out, 'catalog', '--list') == EXIT_OK
    assert 'O16' in capsys.readouterr().out.splitlines()


def test_unknown_gate_is_a_usage_error(out, capsys):
    assert run(out, 'catalog', 'P7') == EXIT_USAGE
    assert capsys.readouterr().err.startswith("error: named_gate: unknown gate 'P7'")


def test_classify_file_and_stdin(out, capsys, monkeypatch):
    run(out, 'catalog', 'O16')
    capsys.readouterr()
    assert run(out, 'classify', str(out / 'O16.txt')) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[0] == '2-unitary, ep=1'

    monkeypatch.setattr('sys.stdin', io.StringIO(export.format_matrix(catalog.named_gate('CNOT'))))
    assert run(out, 'classify', '-') == EXIT_OK
    assert capsys.readouterr().out.splitlines()[0] == 't-dual, ep=0.666667'


def test_classify_rejects_non_square_dimension(out, tmp_path, capsys):
    path = export.write_matrix(np.eye(3), tmp_path / 'three.txt')
    assert run(out, 'classify', str(path)) == EXIT_USAGE
    assert 'classify_duality' in capsys.readouterr().err


def test_iterate_is_reproducible(tmp_path):
    argv = ['--seed', '5', 'iterate', '--d', '2', '--max-iters', '500', '--store-every', '50']
    assert main(['--out-dir', str(tmp_path / 'a'), *argv]) == EXIT_OK
    assert main(['--out-dir', str(tmp_path / 'b'), *argv]) == EXIT_OK
    assert_array_equal(export.read_matrix(tmp_path / 'a' / 'final.txt'),
                       export.read_matrix(tmp_path / 'b' / 'final.txt'))
    header = (tmp_path / 'a' / 'trajectory.csv').read_text().splitlines()[0]
    assert header == 'iter,dual_defect,t_dual_defect,ep'


def test_iterate_from_identity_reports_rank_deficiency(out, tmp_path, capsys):
    seed = export.write_matrix(np.eye(4), tmp_path / 'identity.txt')
    assert run(out, 'iterate', '--seed-file', str(seed)) == EXIT_NUMERIC
    assert 'rank_deficient' in capsys.readouterr().out


def test_cartan_and_regime(out, capsys):
    assert run(out, 'cartan', '--seed', '0.7853981633974483,0.39269908169872414,0.19634954084936207',
               '--steps', '40') == EXIT_OK
    text = capsys.readouterr().out
    assert 'swap_cnot_dcnot_face' in text
    assert len((out / 'cartan.csv').read_text().splitlines()) == 42

    assert run(out, 'regime', '--seed', '0.5,0.3,0') == EXIT_OK
    assert 'base_XY' in capsys.readouterr().out


def test_regime_writes_no_sidecar(out):
    assert run(out, 'regime', '--seed', '0.3,0.3,0.3') == EXIT_OK
    assert not (out / 'run_config.json').exists()


def test_bad_triple_is_a_usage_error(out):
    assert run(out, 'regime', '--seed', '0.3,0.3') == EXIT_USAGE
    assert main([]) == EXIT_USAGE


def test_distribution_and_compare(out, capsys):
    run(out, 'catalog', 'P9')
    run(out, 'catalog', 'SWAP3')
    for name in ('P9', 'SWAP3'):
        assert run(out, 'distribution', str(out / f'{name}.txt'), '--N', '2e3', '--measure', 'linear',
                   '-o', str(out / f'{name}.csv')) == EXIT_OK
    assert (out / 'P9.json').exists()
    capsys.readouterr()

    assert run(out, 'compare', str(out / 'P9.csv'), str(out / 'SWAP3.json')) == EXIT_OK
    text = capsys.readouterr().out
    assert 'distinguishable (LU-inequivalent)' in text
    assert 'N=(2000, 2000)' in text


def test_enumerate_two_qubits(out, capsys):
    assert run(out, 'enumerate', '--d', '2') == EXIT_OK
    assert '2 entangling classes (exact' in capsys.readouterr().out
    assert (out / 'classes_d2.csv').read_text().startswith('ep,gt,representative,count')


def test_design_of_permutation(out, tmp_path, capsys):
    path = tmp_path / 'p9.txt'
    path.write_text('{1,5,9,6,7,2,8,3,4}\n')
    assert run(out, 'design', str(path), '--permutation', '--ame') == EXIT_OK
    assert capsys.readouterr().out.startswith('permutation {1,5,9,6,7,2,8,3,4}: 2-unitary')
    assert (out / 'design.txt').exists()
    assert len((out / 'ame.txt').read_text().splitlines()) == 9


def test_design_of_u9_is_quantum(out, capsys):
    run(out, 'catalog', 'U9')
    capsys.readouterr()
    assert run(out, 'design', str(out / 'U9.txt')) == EXIT_OK
    assert 'cardinalities (5, 5)' in capsys.readouterr().out


def test_design_of_entangled_gate_is_numeric_error(out, tmp_path, capsys):
    path = export.write_matrix(sample_cue(4, RngStream(1)), tmp_path / 'cue.txt')
    assert run(out, 'design', str(path)) == EXIT_NUMERIC
    assert 'error: extract_quantum_design' in capsys.readouterr().err


def test_verify_single_criterion(out, capsys):
    assert run(out, 'verify', '--only', 'A2') == EXIT_OK
    assert '1/1 criteria passed' in capsys.readouterr().out


def test_config_replays_saved_command(out):
    assert run(out, 'catalog', 'P16') == EXIT_OK
    (out / 'P16.txt').unlink()
    assert main(['--config', str(out / 'run_config.json')]) == EXIT_OK
    assert (out / 'P16.txt').exists()


@pytest.mark.parametrize('suite', ['paper', 'reference'])
def test_verify_suite_names(out, capsys, suite):
    assert run(out, 'verify', '--suite', suite, '--only', 'A2') == EXIT_OK
    assert '1/1 criteria passed' in capsys.readouterr().out
