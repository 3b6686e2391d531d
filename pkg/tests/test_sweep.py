import pytest

from dataclasses import replace

from linemarch import Sweep, search
from linemarch.library import case_a
from linemarch.shared import ScenarioError
from linemarch.sweep import parse_grid


def short():
	scenario = case_a()
	return replace(scenario, sim=replace(scenario.sim, duration=0.01))


def test_empty():
	sweep = Sweep(short())
	assert len(sweep) == 1
	(name, overrides, scenario), = list(sweep)
	assert overrides == {}
	assert scenario == short()

def test_grid():
	sweep = Sweep(short(), {'gains.alpha': search(5, 10, 20), 'sim.rng_seed': search(1, 2)})
	assert len(sweep) == 6

	settings = list(sweep)
	assert [name for name, _, _ in settings] == [f'case-a-{k}' for k in range(6)]
	assert {scenario.gains.alpha for _, _, scenario in settings} == {5.0, 10.0, 20.0}
	assert settings[1][1] == {'gains.alpha': '5', 'sim.rng_seed': '2'}
	assert settings[1][2].sim.rng_seed == 2

def test_bad_axis():
	with pytest.raises(ScenarioError):
		list(Sweep(short(), {'gains.nothing': search(1)}))
	with pytest.raises(ScenarioError, match='rho must exceed'):
		list(Sweep(short(), {'march.rho': search(4, 1)}))

def test_parse_grid():
	axes = parse_grid(['gains.alpha=5, 10', 'sim.T=0.01'])
	assert axes['gains.alpha'].points == ['5', '10']
	assert len(axes['sim.T']) == 1
	with pytest.raises(ValueError):
		parse_grid(['gains.alpha'])

def test_run_all(tmp_path):
	sweep = Sweep(short(), {'gains.beta': search(5, 10)})
	results = sweep.run_all(tmp_path)
	assert list(results.index) == ['case-a-0', 'case-a-1']
	assert {'convergence_time', 'min_robot_robot', 'min_robot_obstacle', 'stuck', 'final_spacing_error'} <= set(results.columns)

	with open(sweep.progress_file) as f:
		assert f.read().split() == ['case-a-0', 'case-a-1']

def test_three_exceptions_quit(tmp_path, monkeypatch):
	def boom(scenario):
		raise RuntimeError('nope')
	monkeypatch.setattr('linemarch.sweep.run_scenario', boom)

	sweep = Sweep(short(), {'gains.alpha': search(1, 2, 3, 4)})
	with pytest.raises(ChildProcessError):
		sweep.run_all(tmp_path)

	with open(sweep.exc_file) as f:
		assert len(f.readlines()) == 3
	with open(sweep.exc_log_file) as f:
		assert 'nope' in f.read()
