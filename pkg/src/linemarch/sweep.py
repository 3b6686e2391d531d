''' Parameter sweeps: grid-search scenario fields and keep one metrics row
	per setting.

	```python
	sweep = Sweep(case_a(), {'gains.alpha': search(5, 10, 20), 'sim.rng_seed': search(1, 2)})
	len(sweep)      # 6
	sweep.run_all('runs', n_proc=3)
	```

	Progress (finished setting names), results (parquet) and exceptions are
	kept next to each other under `<out>/sweeps/<scenario>/<stamp>.*`, every
	file guarded by its own lock so several processes can write.
'''
from __future__ import annotations
from dataclasses import dataclass, field
from itertools import product
from functools import reduce
from pathlib import Path
from typing import Any, Iterator, TypeVar
from filelock import FileLock

import os, traceback, datetime, multiprocess, pandas as pd

from .engine import run_scenario
from .metrics import compute_metrics
from .scenario import Scenario
from .shared import log, BOLD, YELLOW, RED, GREY, RESET

T = TypeVar('T')


@dataclass
class Dimension:
	''' one swept axis, a plain list of points for now '''
	points : list[Any]

	def __iter__(self) -> Iterator[Any]:
		yield from self.points

	def __len__(self) -> int:
		return len(self.points)

	def __str__(self) -> str:
		return ', '.join(str(point) for point in self.points)


def search(*points: T) -> Dimension:
	return Dimension(list(points))


def parse_grid(pairs: list[str]) -> dict[str, Dimension]:
	''' cli form `gains.alpha=5,10,20` '''
	axes = {}
	for pair in pairs:
		key, sep, values = pair.partition('=')
		if not sep or not values:
			raise ValueError(f'grid axis must look like key=v1,v2,..., got {pair!r}')
		axes[key.strip()] = search(*[value.strip() for value in values.split(',')])
	return axes


@dataclass
class Sweep:
	scenario	: Scenario
	axes		: dict[str, Dimension] = field(default_factory=dict)
	__start_time: str = field(init=False, default_factory=lambda: datetime.datetime.now().strftime('%Y%m%d-%H%M%S'))

	def __len__(self) -> int:
		return reduce(lambda a, b: a * b, map(len, self.axes.values()), 1)

	def __iter__(self) -> Iterator[tuple[str, dict[str, str], Scenario]]:
		''' (name, overrides, scenario) per grid point '''
		keys = list(self.axes)
		for k, point in enumerate(product(*self.axes.values())):
			overrides = {key: str(value) for key, value in zip(keys, point)}
			yield f'{self.scenario.name}-{k}', overrides, self.scenario.with_overrides(overrides).validate()

	def __str__(self) -> str:
		string = f'\n{YELLOW}{len(self):3} {self.scenario.name}{RESET}'
		for key, dimension in self.axes.items():
			string += f'\n {len(dimension):2} {BOLD}{key}{RESET}: [ {dimension} ]'
		return string + '\n'

	def setup(self, out_dir: str | Path) -> None:
		self.experiment_dir = Path(out_dir) / 'sweeps' / self.scenario.name

	@property
	def __experiment_file(self) -> str:
		return str(self.experiment_dir / self.__start_time)

	@property
	def progress_file(self) -> str:
		return self.__experiment_file + '.progress'

	@property
	def result_file(self) -> str:
		return self.__experiment_file + '.parquet'

	@property
	def exc_file(self) -> str:
		return self.__experiment_file + '.exceptions'

	@property
	def exc_log_file(self) -> str:
		return self.__experiment_file + '.exceptions.log'

	def __resume(self, resume: bool) -> list[str]:
		''' finished setting names of the last sweep when resuming,
			otherwise start a fresh progress file '''
		os.makedirs(self.experiment_dir, exist_ok=True)
		progress_files = sorted(
			name for name in os.listdir(self.experiment_dir)
			if name.endswith('.progress')
		)

		if resume and len(progress_files) == 0:
			log(f'{YELLOW}Nothing to resume from, starting new sweep{RESET}')
		elif resume:
			self.__start_time = progress_files[-1].split('.')[0]
			log(f'{YELLOW}resuming from {progress_files[-1]}{RESET}')
			return self.__get_progress()

		with open(self.progress_file, 'a'): pass
		return []

	def __get_progress(self) -> list[str]:
		with FileLock(self.progress_file + '.lock'):
			with open(self.progress_file) as progress_file:
				return [line.strip() for line in progress_file if line.strip()]

	def __store_progress(self, name: str) -> None:
		with FileLock(self.progress_file + '.lock'):
			with open(self.progress_file, 'a') as progress_file:
				log(name, file=progress_file)

	def __store_result(self, name: str, row: dict) -> pd.DataFrame:
		with FileLock(self.result_file + '.lock'):
			results = pd.read_parquet(self.result_file) if os.path.exists(self.result_file) else pd.DataFrame({})

			results = pd.concat([results, pd.DataFrame([row], index=[name])])
			results.to_parquet(self.result_file)
		return results

	def __store_exception(self, name: str, exception: Exception) -> None:
		exc_time = datetime.datetime.now()

		with FileLock(self.exc_file + '.lock'):
			with open(self.exc_file, 'a') as exc_file:
				log(f'{name} {exc_time.isoformat()}', file=exc_file)
			with open(self.exc_file) as exc_file:
				times = [datetime.datetime.fromisoformat(line.split(maxsplit=1)[1].strip()) for line in exc_file]

		with FileLock(self.exc_log_file + '.lock'):
			with open(self.exc_log_file, 'a') as exc_log_file:
				log(f'\n\n{name} {exc_time.isoformat()}', file=exc_log_file)
				log(traceback.format_exc(), file=exc_log_file)

		if len(times) >= 3 and (times[-1] - times[-3]).total_seconds() < 3 * 60:
			log(f'{RED}Three exceptions in three minutes, quitting{RESET}')
			raise ChildProcessError('3 Exceptions in 3 minutes, quitting') from exception

	def __run_setting(self, index: int, name: str, overrides: dict[str, str], scenario: Scenario,
					  finished: list[str], rerun: bool) -> None:
		index += 1 # for natural language indexing
		if not rerun and name in finished:
			log(f'Skipping {index}: {BOLD}{name}{RESET}')
			return

		try:
			log(f'\nRunning setting {index}: {BOLD}{name}{RESET} {overrides}')
			report = compute_metrics(run_scenario(scenario), scenario.march)
			robot_robot, robot_obstacle = report.worst_margins
			row = {
				**overrides,
				'convergence_time': report.convergence_time,
				'min_robot_robot': robot_robot,
				'min_robot_obstacle': robot_obstacle,
				'stuck': len(report.stuck_robots),
				'final_spacing_error': max(report.spacing_errors[-1], default=0.0) if report.spacing_errors else None,
			}
			self.__store_result(name, row)
			self.__store_progress(name)
			log(f'Done with {index}: {BOLD}{name}{RESET}')

		except Exception as e:
			log(f' {RED}!!!{RESET}\t{BOLD}{name}{RED} failed {RESET}\n{traceback.format_exc()}')
			self.__store_exception(name, e) # can raise: too many failures

	def run_all(self, out_dir: str | Path, n_proc: int = 1, resume: bool = False, rerun: bool = False
				) -> pd.DataFrame | None:
		self.setup(out_dir)
		settings = list(self)
		finished = self.__resume(resume)

		log(f'Sweeping: {self}')
		log(f'{GREY}PROGRESS FILE: \t{self.progress_file}{RESET}')
		log(f'{GREY}RESULT FILE  : \t{self.result_file}{RESET}')

		jobs = [(index, *setting, finished, rerun) for index, setting in enumerate(settings)]
		if n_proc == 1:
			for job in jobs:
				self.__run_setting(*job)
		else:
			with multiprocess.Pool(n_proc) as pool:
				pool.starmap(self.__run_setting, jobs, chunksize=1)

		with FileLock(self.result_file + '.lock'):
			if os.path.exists(self.result_file):
				return pd.read_parquet(self.result_file)
		log(f'{RED}WARNING: no results found!{RESET}')
		return None
