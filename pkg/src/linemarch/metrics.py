''' How well did a run do: formation errors over time, safety margins, the
	order of the line, when (if ever) the line settled, who got stuck.
	Everything here is post-processing over finished logs.
'''
from __future__ import annotations
from dataclasses import dataclass, field, asdict

import math, numpy as np, pandas as pd

from .control import MarchSpec
from .geometry import Vec2, inner, distance
from .records import TrajectoryLog
from .swarm import RobotState, ObstacleState

TOL = 0.05


@dataclass
class MetricsReport:
	''' time series are aligned with `t`; a None entry means the quantity is
		undefined at that instant (e.g. no robot-robot margin with one robot) '''
	t					: list[float] = field(default_factory=list)
	spacing_errors		: list[list[float]] = field(default_factory=list)
	lateral_spread		: list[float | None] = field(default_factory=list)
	velocity_error		: list[float | None] = field(default_factory=list)
	min_robot_robot		: list[float | None] = field(default_factory=list)
	min_robot_obstacle	: list[float | None] = field(default_factory=list)
	convergence_time	: float | None = None
	chain_order			: list[int] = field(default_factory=list)
	stuck_robots		: list[int] = field(default_factory=list)
	tol					: float = TOL

	def to_dict(self) -> dict:
		return asdict(self)

	@property
	def worst_margins(self) -> tuple[float | None, float | None]:
		worst = lambda series: min((v for v in series if v is not None), default=None)
		return worst(self.min_robot_robot), worst(self.min_robot_obstacle)


def chain_order(robots: list[RobotState], march: MarchSpec) -> list[int]:
	''' labels of working robots, rearmost first along e_l, ties by label '''
	working = [robot for robot in robots if not robot.failed]
	return [robot.label for robot in sorted(working, key=lambda r: (inner(r.p, march.e_l), r.label))]


def safety_margins(robots: list[RobotState], obstacles: list[ObstacleState]
				   ) -> tuple[float | None, float | None]:
	''' worst clearance beyond the combined safety radii, robot-robot and
		robot-obstacle. Nonnegative means no constraint is violated. '''
	robot_robot = min((
		distance(a.p, b.p) - (a.delta_safety + b.delta_safety)
		for k, a in enumerate(robots) for b in robots[k + 1:]
	), default=None)
	robot_obstacle = min((
		distance(robot.p, obstacle.q) - (robot.delta_safety + obstacle.nu_safety)
		for robot in robots for obstacle in obstacles
	), default=None)
	return robot_robot, robot_obstacle


def margin_series(points: np.ndarray, radii: np.ndarray, failed: np.ndarray,
				  q: np.ndarray, nu: np.ndarray, kappa1: float) -> pd.DataFrame:
	''' `safety_margins` for a whole run at once, plus whether collision
		avoidance is active anywhere (some working robot inside kappa1 times
		the combined radii of a robot or obstacle).

		points (K, N, 2), radii (N,), failed (K, N), q (K, M, 2), nu (M,)
	'''
	K, N = points.shape[:2]
	M = q.shape[1]
	robot_robot = np.full(K, np.nan)
	robot_obstacle = np.full(K, np.nan)
	active = np.zeros(K, dtype=bool)

	if N > 1:
		i, j = np.triu_indices(N, k=1)
		d = np.linalg.norm(points[:, i] - points[:, j], axis=-1)
		s = radii[i] + radii[j]
		robot_robot = (d - s).min(axis=1)
		either_working = ~(failed[:, i] & failed[:, j])
		active |= ((d < kappa1 * s) & either_working).any(axis=1)

	if M > 0:
		d = np.linalg.norm(points[:, :, None, :] - q[:, None, :, :], axis=-1)
		s = radii[:, None] + nu[None, :]
		robot_obstacle = (d - s).reshape(K, -1).min(axis=1)
		active |= ((d < kappa1 * s) & ~failed[:, :, None]).reshape(K, -1).any(axis=1)

	return pd.DataFrame({
		'min_robot_robot': robot_robot,
		'min_robot_obstacle': robot_obstacle,
		'ca_active': active,
	})


def formation_series(log: TrajectoryLog, march: MarchSpec) -> pd.DataFrame:
	''' per control period: worst gap error, lateral spread, worst velocity
		error and line length, over working robots only '''
	x, y = log.frames('x'), log.frames('y')
	vx, vy = log.frames('vx'), log.frames('vy')
	failed = log.frames('failed').astype(bool)
	e_l, e_perp = march.e_l, march.e_l_perp

	along = np.where(failed, np.nan, x * e_l.x + y * e_l.y)
	across = x * e_perp.x + y * e_perp.y
	working = (~failed).sum(axis=1)

	# nan sorts last, so working robots come first in chain order
	ordered = np.sort(along, axis=1)
	gaps = np.abs(np.diff(ordered, axis=1) - march.rho)
	has_gap = ~np.isnan(gaps)
	spacing = np.where(has_gap, gaps, -np.inf).max(axis=1, initial=-np.inf)
	spacing = np.where(working > 1, spacing, 0.0)

	lateral = np.where(failed, -np.inf, across).max(axis=1, initial=-np.inf) \
		- np.where(failed, np.inf, across).min(axis=1, initial=np.inf)
	velocity = np.where(failed, -np.inf, np.hypot(vx - march.v_l.x, vy - march.v_l.y)).max(axis=1, initial=-np.inf)

	nothing = working == 0
	frame = pd.DataFrame({
		't': log.steps['t'].to_numpy(),
		'spacing_error': np.where(nothing, np.nan, spacing),
		'lateral_spread': np.where(nothing, np.nan, lateral),
		'velocity_error': np.where(nothing, np.nan, velocity),
		'line_length': working,
		'ca_active': log.steps['ca_active'].to_numpy(),
	})
	frame.attrs['gaps'] = [row[keep] for row, keep in zip(gaps, has_gap)]
	return frame


def formed(series: pd.DataFrame, tol: float = TOL) -> np.ndarray:
	''' the line predicate per control period: every gap rho, nobody off the
		line, everybody at v_l (all within tol) '''
	return ((series['line_length'] > 0)
		& (series['spacing_error'] < tol)
		& (series['lateral_spread'] < tol)
		& (series['velocity_error'] < tol)).to_numpy()


def line_formed(log: TrajectoryLog, march: MarchSpec, k: int, tol: float = TOL) -> bool:
	return bool(formed(formation_series(log, march), tol)[k])


def convergence_time(log: TrajectoryLog, march: MarchSpec, tol: float = TOL,
					 series: pd.DataFrame | None = None) -> float | None:
	''' earliest time after which the line stays formed for the rest of the
		run, periods with active collision avoidance excused '''
	series = formation_series(log, march) if series is None else series
	ok = formed(series, tol)
	excused = ok | series['ca_active'].to_numpy()
	if len(ok) == 0: return None

	broken = np.flatnonzero(~excused)
	start = broken[-1] + 1 if len(broken) else 0
	settled = np.flatnonzero(ok[start:] & ~series['ca_active'].to_numpy()[start:])
	if len(settled) == 0: return None
	return float(series['t'].iloc[start + settled[0]])


def final_robots(log: TrajectoryLog) -> list[RobotState]:
	last = log.records[log.records['t'] == log.records['t'].iloc[-1]]
	return [
		RobotState(label=int(row.robot), p=Vec2(row.x, row.y), v=Vec2(row.vx, row.vy), failed=bool(row.failed))
		for row in last.itertuples()
	]


def stuck_robots(log: TrajectoryLog, march: MarchSpec, window: float = 0.2, speed_factor: float = 0.01) -> list[int]:
	''' working robots that have come to rest short of the line: over the last
		`window` of the run their mean speed is below speed_factor ||v_l||
		while they sit more than rho behind the place their rank in the line
		would give them behind the head '''
	if len(log.records) == 0: return []

	order = chain_order(final_robots(log), march)
	if len(order) == 0: return []
	positions = {robot.label: robot.p for robot in final_robots(log)}
	head = inner(positions[order[-1]], march.e_l)

	tail = max(1, math.ceil(window * log.n_steps))
	mean_speed = np.hypot(log.frames('vx')[-tail:], log.frames('vy')[-tail:]).mean(axis=0)
	speed = dict(zip(log.labels, mean_speed.tolist()))

	stuck = []
	for rank, label in enumerate(reversed(order)):
		slot = head - rank * march.rho
		behind = slot - inner(positions[label], march.e_l)
		if speed[label] < speed_factor * march.v_l.norm() and behind > march.rho:
			stuck.append(label)
	return sorted(stuck)


def compute_metrics(log: TrajectoryLog, march: MarchSpec, tol: float = TOL) -> MetricsReport:
	if len(log.records) == 0:
		return MetricsReport(tol=tol)

	series = formation_series(log, march)
	undefined = lambda values: [None if math.isnan(v) else float(v) for v in values]

	return MetricsReport(
		t = log.steps['t'].astype(float).tolist(),
		spacing_errors = [gaps.astype(float).tolist() for gaps in series.attrs['gaps']],
		lateral_spread = undefined(series['lateral_spread']),
		velocity_error = undefined(series['velocity_error']),
		min_robot_robot = undefined(log.steps['min_robot_robot']),
		min_robot_obstacle = undefined(log.steps['min_robot_obstacle']),
		convergence_time = convergence_time(log, march, tol, series),
		chain_order = chain_order(final_robots(log), march),
		stuck_robots = stuck_robots(log, march),
		tol = tol,
	)
