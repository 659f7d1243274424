import json

import pytest
from pydantic import ValidationError
from typer.testing import CliRunner

from app.api.dependencies import get_pipeline_service
from app.api.exceptions import ConfigurationException, DomainException
from app.domains.certify.schema import SpectralReport
from app.domains.pipeline.schema import OperatorSelector, RunConfig
from app.domains.pipeline.service import RESOLUTION_FLAG
from app.main import cli

runner = CliRunner()


@pytest.fixture
def small_config(tmp_path):
    return RunConfig(
        N=10, radial_nodes=2000, out=tmp_path / 'out', cache_dir=tmp_path / 'cache', emit_slices=True,
        eig_mode='symmetrized'
    )


# --- Configuration ---
def test_default_configuration():
    config = RunConfig()
    assert (config.L, config.a, config.N) == (20.0, 4.0, 48)
    assert config.operator == OperatorSelector.M
    assert config.eig_mode == 'general'


@pytest.mark.parametrize('values', [{'N': 47}, {'L': -1.0}, {'radial_nodes': 50}, {'eig_mode': 'fast'}])
def test_configuration_validation(values):
    with pytest.raises(ValidationError):
        RunConfig(**values)


def test_flags_override_config_file(tmp_path):
    config_file = tmp_path / 'run.yaml'
    config_file.write_text('N: 32\noperator: B2\ntol_eig: 1.0e-9\n', encoding='utf-8')
    config = RunConfig.from_sources(config_file, {'N': 40, 'operator': None})
    assert config.N == 40
    assert config.operator == OperatorSelector.B2
    assert config.tol_eig == 1e-9


def test_json_config_file(tmp_path):
    config_file = tmp_path / 'run.json'
    config_file.write_text(json.dumps({'a': 5.0, 'use_cache': False}), encoding='utf-8')
    config = RunConfig.from_sources(config_file)
    assert config.a == 5.0
    assert not config.use_cache


@pytest.mark.parametrize('content', ['- 1\n- 2\n', 'N: [1, 2\n'])
def test_malformed_config_file(tmp_path, content):
    config_file = tmp_path / 'run.yaml'
    config_file.write_text(content, encoding='utf-8')
    with pytest.raises(ConfigurationException) as error:
        RunConfig.from_sources(config_file)
    assert error.value.exit_code == 2


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigurationException):
        RunConfig.from_sources(tmp_path / 'absent.yaml')


# --- Pipeline ---
def test_low_resolution_run_is_flagged(small_config):
    reports = get_pipeline_service(small_config).run_pipeline()
    assert len(reports) == 1
    assert reports[0].operator == 'M'
    assert RESOLUTION_FLAG in reports[0].flags
    assert reports[0].grid.N == 10


def test_run_writes_artifacts(small_config):
    get_pipeline_service(small_config).run_pipeline()
    out = small_config.out
    document = json.loads((out / 'report_M.json').read_text(encoding='utf-8'))
    assert {'operator', 'grid', 'eigenvalues', 'residuals', 'parities', 'angles', 'bounds', 'verdict',
            'c1_estimate', 'wall_time_s'} <= set(document)
    for name in ('summary', 'angles_M', 'radial_profile', 'field_Q', 'field_Qx', 'field_Qy'):
        assert (out / 'slices' / f'{name}.csv').exists()
    assert list(small_config.cache_dir.glob('radial_L20_N2000_*.txt'))


def test_runs_are_reproducible(small_config):
    first = get_pipeline_service(small_config).run_pipeline()
    second = get_pipeline_service(small_config).run_pipeline()
    exclude = {'wall_time_s'}
    assert [r.model_dump(exclude=exclude) for r in first] == [r.model_dump(exclude=exclude) for r in second]


def test_all_operators(small_config):
    config = small_config.model_copy(update={'operator': OperatorSelector.ALL, 'emit_slices': False})
    reports = get_pipeline_service(config).run_pipeline()
    assert [r.operator for r in reports] == ['M', 'B2', 'L_op', 'M_bar']
    for selector in ('M', 'B2', 'L_op', 'P2bar'):
        assert (config.out / f'report_{selector}.json').exists()
    assert len({r.c1_estimate for r in reports}) == 1


def test_virial_report_certifies_half_of_the_operator(small_config):
    report = get_pipeline_service(small_config).run_pipeline()[0]
    assert report.operator == 'M'
    assert (report.scale, report.cutoff) == (0.5, 0.5)
    assert report.certified_eigenvalues == pytest.approx([0.5 * v for v in report.eigenvalues])


def test_ground_state_fields_are_frozen(small_config):
    service = get_pipeline_service(small_config)
    state = service.build_fields(service.load_profile())
    assert set(state.as_dict()) == {'Q', 'Qx', 'Qy'}
    with pytest.raises(ValidationError):
        state.Q = state.Qx


def test_matrix_dumps(small_config):
    config = small_config.model_copy(update={'dump_matrices': True, 'emit_slices': False})
    get_pipeline_service(config).run_pipeline()
    assert (config.out / 'matrices' / 'matrix_M_N10.bin').stat().st_size == 16 + 81 * 81 * 8


def test_stage_is_attached_to_failures(small_config):
    config = small_config.model_copy(update={'L': 5.0})
    with pytest.raises(DomainException) as error:
        get_pipeline_service(config).run_pipeline()
    assert error.value.stage == 'ground_state'


def test_saved_report_validates(small_config):
    get_pipeline_service(small_config).run_pipeline()
    text = (small_config.out / 'report_M.json').read_text(encoding='utf-8')
    assert SpectralReport.model_validate_json(text).operator == 'M'


# --- Command line ---
def test_cli_rejects_odd_degree(tmp_path):
    result = runner.invoke(cli, ['run', '--n', '11', '--out', str(tmp_path)])
    assert result.exit_code == 2


def test_cli_grid_info():
    result = runner.invoke(cli, ['grid-info', '--n', '16'])
    assert result.exit_code == 0
    assert 'sum of weights' in result.stdout


def test_cli_run_json(tmp_path):
    result = runner.invoke(cli, [
        'run', '--n', '10', '--radial-nodes', '2000', '--out', str(tmp_path / 'out'),
        '--cache-dir', str(tmp_path / 'cache'), '--eig-mode', 'symmetrized', '--json'
    ])
    assert result.exit_code == 0
    assert (tmp_path / 'out' / 'report_M.json').exists()


def test_cli_unknown_ground_state_method():
    result = runner.invoke(cli, ['ground-state', '--method', 'newton'])
    assert result.exit_code == 2


def test_cli_bad_config_file(tmp_path):
    config_file = tmp_path / 'run.yaml'
    config_file.write_text('- 1\n', encoding='utf-8')
    result = runner.invoke(cli, ['run', '--config', str(config_file)])
    assert result.exit_code == 2
    assert '"ConfigurationException"' in result.stderr
    assert '"status": "error"' in result.stderr


def test_cli_verbosity_switch():
    result = runner.invoke(cli, ['--quiet', 'grid-info', '--n', '8'])
    assert result.exit_code == 0
    assert 'sum of weights' in result.stdout
