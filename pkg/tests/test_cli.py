import json
import typing as T
from pathlib import Path

import docopt
import pytest as PT
import yaml

from beta_hankel.__main__ import __doc__ as usage, beta_hankel


def run(argv: T.List[str], capsys: PT.CaptureFixture[str]) -> T.Dict[str, T.Any]:
  beta_hankel(docopt.docopt(usage, argv=argv))  # type: ignore
  return json.loads(capsys.readouterr().out)

def exit_code(argv: T.List[str]) -> int:
  with PT.raises(SystemExit) as exc_info:
    beta_hankel(docopt.docopt(usage, argv=argv))  # type: ignore
  return T.cast(int, exc_info.value.code)

def write_config(tmp_path: Path, data: T.Dict[str, T.Any]) -> str:
  path = tmp_path / 'run.yaml'
  path.write_text(yaml.dump(data))
  return str(path)


def test_params(capsys: PT.CaptureFixture[str]):
  report = run(['params', '--n=3', '--beta=1', '--k=0'], capsys)
  assert report['params']['gamma'] == 2
  assert report['params']['mu'] == 1
  assert report['harmonic_dimension'] == 1

def test_params_as_yaml(capsys: PT.CaptureFixture[str]):
  beta_hankel(docopt.docopt(usage, argv=['params', '--yaml']))  # type: ignore
  assert yaml.safe_load(capsys.readouterr().out)['params']['n'] == 3

def test_params_with_triplets(tmp_path: Path, capsys: PT.CaptureFixture[str]):
  report = run(['params', '--triplets=q=2,p=2..4', f'--out={tmp_path}'], capsys)
  assert [t['kind'] for t in report['triplets']] == ['admissible', 'admissible', 'generalized']
  assert (tmp_path / 'params.json').exists()
  assert (tmp_path / 'triplets.csv').read_text().startswith('m,p,q,kind\n')

def test_bad_model_exits_with_one(caplog: PT.LogCaptureFixture):
  assert exit_code(['params', '--beta=2.5']) == 1
  assert 'beta: ' in caplog.text

def test_bad_lattice_exits_with_one():
  assert exit_code(['params', '--triplets=q=2']) == 1


def test_verify_watson(tmp_path: Path, capsys: PT.CaptureFixture[str]):
  report = run(['verify', '--suite=watson', f'--out={tmp_path}'], capsys)
  assert report['passed']
  assert len(report['checks']) == 18
  assert json.loads((tmp_path / 'verify.json').read_text())['passed']

def test_verify_transform(capsys: PT.CaptureFixture[str]):
  report = run(['verify', '--suite=transform'], capsys)
  assert all(check['pass'] for check in report['checks']), report['checks']

@PT.mark.parametrize('argv', [['verify'], ['verify', '--suite=nope']])
def test_verify_needs_known_suites(argv: T.List[str]):
  assert exit_code(argv) == 1


def test_evolve_zero_data(tmp_path: Path, capsys: PT.CaptureFixture[str]):
  config = write_config(tmp_path, {
    'data': {'kind': 'zero'},
    'evolution': {'t_end': 0.5, 'steps': 2, 'triplet': [3, 3, 2], 'dump_times': [0.5]},
  })
  report = run(['evolve', f'--config={config}', f'--out={tmp_path / "out"}'], capsys)
  assert not report['blowup']['detected']
  assert report['t_reached'] == PT.approx(0.5)
  assert report['norms']['X'] == 0
  assert (tmp_path / 'out' / 'trajectory.csv').exists()
  assert (tmp_path / 'out' / 'states' / 'state_t0.5.csv').exists()

def test_evolve_small_data(tmp_path: Path, capsys: PT.CaptureFixture[str]):
  config = write_config(tmp_path, {
    'data': {'kind': 'bump', 'amplitude': 0.1},
    'evolution': {'t_end': 0.2, 'steps': 1, 'triplet': [3, 3, 2]},
  })
  report = run(['evolve', f'--config={config}'], capsys)
  assert not report['blowup']['detected']
  assert report['duhamel_audit']['trial'] == 'evolve'

def test_evolve_is_deterministic(tmp_path: Path):
  config = write_config(tmp_path, {
    'data': {'kind': 'gaussian', 'amplitude': 0.5},
    'evolution': {'t_end': 0.2, 'steps': 2, 'triplet': [3, 3, 2]},
  })
  for name in ('first', 'second'):
    beta_hankel(docopt.docopt(usage, argv=['evolve', f'--config={config}', f'--out={tmp_path / name}']))  # type: ignore
  for output in ('evolve.json', 'trajectory.csv'):
    assert (tmp_path / 'first' / output).read_bytes() == (tmp_path / 'second' / output).read_bytes()

def test_evolve_blowup_exits_with_three(tmp_path: Path, caplog: PT.LogCaptureFixture):
  config = write_config(tmp_path, {
    'data': {'kind': 'gaussian', 'amplitude': 5.0},
    'evolution': {'t_end': 1.0, 'steps': 10, 'q': 4},
  })
  assert exit_code(['evolve', f'--config={config}', '--fail-on-blowup']) == 3
  assert 'blew up' in caplog.text

def test_evolve_without_convergence_exits_with_two(tmp_path: Path, caplog: PT.LogCaptureFixture):
  config = write_config(tmp_path, {
    'evolution': {'t_end': 0.1, 'steps': 1, 'picard_max_iter': 1, 'picard_tol': 1e-300},
  })
  assert exit_code(['evolve', f'--config={config}']) == 2
  assert 'Picard iteration failed' in caplog.text


def test_decay_fit(tmp_path: Path, capsys: PT.CaptureFixture[str]):
  config = write_config(tmp_path, {'decay': {'p': 2, 'q': 1, 't_min': 10, 't_max': 1000, 'samples': 24}})
  report = run(['decay-fit', f'--config={config}', '--n=3', '--beta=0', f'--out={tmp_path}'], capsys)
  assert report['smoothing_exponent'] == PT.approx(-0.75)
  assert report['fitted_exponent'] == PT.approx(-0.75, abs=0.01)
  assert (tmp_path / 'decay.csv').read_text().startswith('t,norm\n')

def test_decay_fit_rejects_zero_data(tmp_path: Path):
  config = write_config(tmp_path, {'data': {'kind': 'zero'}})
  assert exit_code(['decay-fit', f'--config={config}']) == 1


def test_young_audit(tmp_path: Path, capsys: PT.CaptureFixture[str]):
  config = write_config(tmp_path, {'young': {'pairs': 2, 'seed': 3}})
  report = run(['young-audit', f'--config={config}', f'--out={tmp_path}'], capsys)
  assert report['failures'] == 0
  assert report['worst_ratio'] <= 1 + 1e-8
  assert (tmp_path / 'young.csv').read_text().startswith('pair,a,b,c,lhs,rhs,ratio,pass\n')
