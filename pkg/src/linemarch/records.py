''' Trajectory logs and their files.

	A log is two tables. `records` has one row per robot per control period,
	ordered by (t, robot). `steps` has one row per control period with the
	obstacle positions, the worst safety margins and whether collision
	avoidance was active anywhere.
'''
from __future__ import annotations
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING

import json, math, pandas as pd

from .shared import FLOAT_FORMAT

if TYPE_CHECKING:
	from .metrics import MetricsReport

COLUMNS = ['t', 'robot', 'x', 'y', 'vx', 'vy', 'leader', 'head', 'failed', 'upsilon', 'varpi', 'wl', 'wr']
STEP_COLUMNS = ['t', 'min_robot_robot', 'min_robot_obstacle', 'ca_active']

DTYPES = {
	't': 'float64', 'robot': 'int64', 'x': 'float64', 'y': 'float64', 'vx': 'float64', 'vy': 'float64',
	'leader': 'Int64', 'head': 'bool', 'failed': 'bool',
	'upsilon': 'float64', 'varpi': 'float64', 'wl': 'float64', 'wr': 'float64',
}


def empty_records() -> pd.DataFrame:
	return pd.DataFrame({name: pd.Series(dtype=dtype) for name, dtype in DTYPES.items()})


def empty_steps() -> pd.DataFrame:
	return pd.DataFrame({
		't': pd.Series(dtype='float64'),
		'min_robot_robot': pd.Series(dtype='float64'),
		'min_robot_obstacle': pd.Series(dtype='float64'),
		'ca_active': pd.Series(dtype='bool'),
	})


@dataclass
class TrajectoryLog:
	records : pd.DataFrame = field(default_factory=empty_records)
	steps	: pd.DataFrame = field(default_factory=empty_steps)

	@property
	def labels(self) -> list[int]:
		return sorted(self.records['robot'].unique().tolist())

	@property
	def n_steps(self) -> int:
		''' number of logged control periods, the initial one included '''
		return len(self.steps)

	def frames(self, column: str):
		''' column as a (periods, robots) array, robots in label order '''
		n = len(self.labels)
		return self.records[column].to_numpy().reshape(-1, n) if n else self.records[column].to_numpy()

	def equals(self, other: TrajectoryLog) -> bool:
		return self.records.equals(other.records) and self.steps.equals(other.steps)


def steps_path(path: str | Path) -> Path:
	path = Path(path)
	return path.with_name(f'{path.stem}_steps{path.suffix}')


def write_log(log: TrajectoryLog, path: str | Path) -> Path:
	''' trajectory csv at `path`, the per-step table next to it as *_steps.csv.
		Booleans are written as 0/1, missing values as empty fields. '''
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)

	records = log.records[COLUMNS].copy()
	records['head'] = records['head'].astype('int64')
	records['failed'] = records['failed'].astype('int64')
	records.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep='')

	steps = log.steps.copy()
	steps['ca_active'] = steps['ca_active'].astype('int64')
	steps.to_csv(steps_path(path), index=False, float_format=FLOAT_FORMAT, na_rep='')
	return path


def read_log(path: str | Path) -> TrajectoryLog:
	path = Path(path)
	records = pd.read_csv(path, float_precision='round_trip', dtype={'leader': 'Int64'})
	records = records.astype({name: dtype for name, dtype in DTYPES.items() if name != 'leader'})

	steps = empty_steps()
	if steps_path(path).exists():
		steps = pd.read_csv(steps_path(path), float_precision='round_trip')
		steps = steps.astype({name: 'float64' for name in steps.columns if name != 'ca_active'})
		steps['ca_active'] = steps['ca_active'].astype('bool')
	return TrajectoryLog(records, steps)


def _jsonable(value):
	''' NaN has no json spelling, write it as null '''
	if isinstance(value, float) and not math.isfinite(value): return None
	if isinstance(value, dict): return {k: _jsonable(v) for k, v in value.items()}
	if isinstance(value, (list, tuple)): return [_jsonable(v) for v in value]
	return value


def write_metrics(report: MetricsReport, path: str | Path) -> Path:
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	with open(path, 'w') as f:
		json.dump(_jsonable(report.to_dict()), f, indent=1)
	return path
