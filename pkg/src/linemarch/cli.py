''' `linemarch` command line.

	linemarch run case-a --out runs --set gains.alpha=5 --seed 7
	linemarch compare case-b --n_proc 3
	linemarch validate my_scenario.json
	linemarch list-scenarios
	linemarch sweep case-a --grid gains.alpha=5,10,20 --n_proc 3

	Exit codes: 0 success, 2 invalid scenario (nothing is written), 1 anything
	that goes wrong while running.
'''
from __future__ import annotations
from dataclasses import replace
from pathlib import Path

import argparse, os, traceback, multiprocess, pandas as pd

from .baselines import Controller
from .engine import banner, run_scenario
from .geometry import inner
from .metrics import MetricsReport, compute_metrics, formation_series, formed, final_robots
from .records import TrajectoryLog, write_log, write_metrics
from .scenario import Scenario, load_scenario, dump_scenario
from .shared import ScenarioError, log, default_out_dir, BOLD, YELLOW, RED, GREY, RESET
from .sweep import Sweep, parse_grid


def parse_overrides(pairs: list[str]) -> dict[str, str]:
	overrides = {}
	for pair in pairs:
		key, sep, value = pair.partition('=')
		if not sep:
			raise ScenarioError(f'--set expects key=value, got {pair!r}')
		overrides[key.strip()] = value.strip()
	return overrides


def resolve(args) -> Scenario:
	''' scenario from the positional argument or --scenario, overrides and seed applied '''
	source = args.scenario_flag or args.scenario
	if source is None:
		raise ScenarioError('no scenario given, pass a built-in name or a json file')
	scenario = load_scenario(source)
	return scenario.with_overrides(parse_overrides(args.set)).with_seed(args.seed).validate()


def summary(scenario: Scenario, report: MetricsReport) -> str:
	robot_robot, robot_obstacle = report.worst_margins
	fmt = lambda value: 'n/a' if value is None else f'{value:.4g}'
	converged = 'never' if report.convergence_time is None else f'{report.convergence_time:.4g}s'
	return (f'{BOLD}{scenario.name}{RESET} [{scenario.controller}]: converged {converged}, '
			f'worst margins robot-robot {fmt(robot_robot)} robot-obstacle {fmt(robot_obstacle)}')


def simulate(scenario: Scenario) -> tuple[TrajectoryLog, MetricsReport]:
	trajectory = run_scenario(scenario)
	return trajectory, compute_metrics(trajectory, scenario.march)


def save(scenario: Scenario, trajectory: TrajectoryLog, report: MetricsReport, run_dir: Path) -> None:
	run_dir.mkdir(parents=True, exist_ok=True)
	dump_scenario(scenario, run_dir / 'scenario.json')
	write_log(trajectory, run_dir / 'trajectory.csv')
	write_metrics(report, run_dir / 'metrics.json')
	with open(run_dir / 'run.log', 'w') as run_log:
		log(banner(scenario), file=run_log)
		log(summary(scenario, report), file=run_log)
	log(f'{GREY}written to {run_dir}{RESET}')


def cmd_run(args) -> int:
	scenario = resolve(args)
	run_dir = Path(args.out) / scenario.name
	try:
		trajectory, report = simulate(scenario)
	except Exception:
		run_dir.mkdir(parents=True, exist_ok=True)
		with open(run_dir / 'run.log', 'w') as run_log:
			log(traceback.format_exc(), file=run_log)
		raise
	save(scenario, trajectory, report, run_dir)
	log(summary(scenario, report))
	return 0


def comparison_row(scenario: Scenario, trajectory: TrajectoryLog, report: MetricsReport) -> dict:
	''' how complete the line is after the failure, who got stuck, final errors '''
	series = formation_series(trajectory, scenario.march)
	final = series.iloc[-1]
	along = sorted(inner(robot.p, scenario.march.e_l) for robot in final_robots(trajectory) if not robot.failed)
	spacings = [b - a for a, b in zip(along, along[1:])]
	return {
		'controller': str(scenario.controller),
		'line_complete': bool(formed(series)[-1]),
		'line_length': int(final['line_length']),
		'largest_gap': max(spacings, default=None),
		'final_spacing_error': float(final['spacing_error']),
		'final_lateral_spread': float(final['lateral_spread']),
		'stuck_robots': len(report.stuck_robots),
		'stuck_labels': ' '.join(map(str, report.stuck_robots)),
		'convergence_time': report.convergence_time,
	}


def cmd_compare(args) -> int:
	base = resolve(args)
	if not base.failures:
		log(f'{YELLOW}WARNING: {base.name} has no failure event, all three controllers should simply converge{RESET}')

	scenarios = [
		replace(base, controller=controller, execution='centralized',
				name=f'{base.name}-{controller}',
				fixed_order=base.fixed_order if controller == Controller.FIXED_CHAIN else None).validate()
		for controller in Controller
	]

	if args.n_proc == 1:
		results = [simulate(scenario) for scenario in scenarios]
	else:
		with multiprocess.Pool(args.n_proc) as pool:
			results = pool.map(simulate, scenarios)

	out = Path(args.out) / f'{base.name}-compare'
	rows = []
	for scenario, (trajectory, report) in zip(scenarios, results):
		save(scenario, trajectory, report, out / str(scenario.controller))
		rows.append(comparison_row(scenario, trajectory, report))
		log(summary(scenario, report))

	table = pd.DataFrame(rows).set_index('controller')
	table.to_csv(out / 'comparison.csv')
	table.to_parquet(out / 'comparison.parquet')
	log(f'\n{table.to_string()}')
	return 0


def cmd_validate(args) -> int:
	scenario = resolve(args)
	log(f'{BOLD}{scenario.name}{RESET}: valid, {len(scenario.robots)} robots, '
		f'{len(scenario.obstacles)} obstacles, {scenario.sim.steps} periods ({scenario.sim.model})')
	return 0


def cmd_list_scenarios(args) -> int:
	from .library import BUILTIN
	for name, factory in BUILTIN.items():
		scenario = factory()
		log(f'{name:26} {scenario.sim.model:10} {scenario.controller:18} '
			f'{len(scenario.robots)} robots, {scenario.sim.duration}s')
	return 0


def cmd_sweep(args) -> int:
	scenario = resolve(args)
	sweep = Sweep(scenario, parse_grid(args.grid))
	# fail fast on a bad axis, before anything is written
	for _ in sweep: pass
	results = sweep.run_all(args.out, n_proc=args.n_proc, resume=args.resume, rerun=args.rerun)
	if results is not None:
		log(results.to_string())
	return 0


COMMANDS = {
	'run': cmd_run,
	'compare': cmd_compare,
	'validate': cmd_validate,
	'list-scenarios': cmd_list_scenarios,
	'sweep': cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
	parser = argparse.ArgumentParser(prog='linemarch', description='dynamic leader-follower line marching')
	parser.add_argument('command', choices=COMMANDS, help='what to do')
	parser.add_argument('scenario', nargs='?', help='built-in scenario name or json file')
	parser.add_argument('--scenario', dest='scenario_flag', help='same as the positional scenario')
	parser.add_argument('--out', default=default_out_dir(), help='output directory (env LINEMARCH_OUT)')
	parser.add_argument('--set', action='append', default=[], metavar='KEY=VALUE',
						help='override a scenario field, e.g. sim.T=0.01 (repeatable)')
	parser.add_argument('--seed', type=int, default=None, help='measurement noise seed')
	parser.add_argument('--n_proc', type=int, default=1, help='multiprocessing for compare/sweep?')
	parser.add_argument('--grid', action='append', default=[], metavar='KEY=V1,V2',
						help='sweep axis (repeatable)')
	parser.add_argument('--resume', action='store_true', help='resume the last sweep?')
	parser.add_argument('--rerun', action='store_true', help='rerun finished sweep settings?')
	parser.add_argument('--quiet', action='store_true', help='no console output')
	return parser


def main(argv: list[str] | None = None) -> int:
	args = build_parser().parse_args(argv)
	if args.quiet:
		os.environ['LINEMARCH_QUIET'] = '1'

	try:
		return COMMANDS[args.command](args)
	except ScenarioError as e:
		log(f'{RED}invalid scenario:{RESET} {e}')
		return 2
	except Exception:
		log(f'{RED}run failed{RESET}\n{traceback.format_exc()}')
		return 1
