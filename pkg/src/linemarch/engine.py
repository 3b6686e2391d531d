''' Time stepping.

	Per control period k (t = k T): apply the failure schedule, measure the
	controlled points (offset points for unicycles, optionally noisy), run one
	decision round, log, then advance the plant. The plant is either the
	point robot integrated exactly over the period (discrete), the same with
	Euler sub-steps (continuous, zero-order hold) or the unicycle driven
	through its offset point with saturated inputs.
'''
from __future__ import annotations
from dataclasses import dataclass, replace
try:
	from enum import StrEnum
except ImportError:  # Python < 3.11
	from enum import Enum

	class StrEnum(str, Enum):
		__str__ = str.__str__
		__format__ = str.__format__
from typing import TYPE_CHECKING

import math, numpy as np, pandas as pd

from .assignment import AssignmentState, assign_and_command
from .baselines import Controller, virtual_structure_anchor, virtual_structure_command, \
	fixed_chain_command, fixed_chain_assignment
from .control import avoidance_velocities
from .geometry import Vec2, ZERO
from .metrics import margin_series
from .records import TrajectoryLog, DTYPES, COLUMNS
from .ring import RingNet, RingAgent
from .shared import ScenarioError, SimulationError, log
from .swarm import RobotState, ObstacleState, SwarmState

if TYPE_CHECKING:
	from .scenario import Scenario


class PlantModel(StrEnum):
	CONTINUOUS = 'continuous'
	DISCRETE = 'discrete'
	UNICYCLE = 'unicycle'


class Execution(StrEnum):
	CENTRALIZED = 'centralized'
	RING = 'ring'


@dataclass(frozen=True)
class SimParams:
	''' - `T`            control (sampling) period in seconds
		- `duration`     simulated seconds, rounded to whole periods
		- `dt_internal`  Euler sub-step of the continuous model, T when None
		- `v_max`, `w_max` unicycle saturation of linear and angular velocity
		- `noise_std`    std of the gaussian noise on measured positions
	'''
	model		: PlantModel = PlantModel.CONTINUOUS
	T			: float = 0.001
	duration	: float = 0.0
	v_max		: float = 1.0
	w_max		: float = 2.0
	noise_std	: float = 0.0
	rng_seed	: int = 0
	dt_internal	: float | None = None

	def __post_init__(self):
		object.__setattr__(self, 'model', PlantModel(self.model))
		if not self.T > 0:
			raise ScenarioError(f'sim.T must be positive, got {self.T}')
		if not self.duration >= 0:
			raise ScenarioError(f'sim.duration must not be negative, got {self.duration}')
		if not self.noise_std >= 0:
			raise ScenarioError(f'sim.noise_std must not be negative, got {self.noise_std}')
		if self.model == PlantModel.UNICYCLE and not (self.v_max > 0 and self.w_max > 0):
			raise ScenarioError('sim.v_max and sim.w_max must be positive for the unicycle model')
		if self.dt_internal is not None and not 0 < self.dt_internal <= self.T:
			raise ScenarioError(f'sim.dt_internal must lie in (0, T], got {self.dt_internal}')

	@property
	def steps(self) -> int:
		return round(self.duration / self.T)

	def step_of(self, t: float) -> int:
		return round(t / self.T)


@dataclass(frozen=True)
class FailureEvent:
	''' robot is down on [t_fail, t_recover); no t_recover means for good '''
	robot		: int
	t_fail		: float
	t_recover	: float | None = None

	def __post_init__(self):
		if not self.t_fail >= 0:
			raise ScenarioError(f'failure of robot {self.robot}: t_fail must not be negative')
		if self.t_recover is not None and not self.t_fail < self.t_recover:
			raise ScenarioError(f'failure of robot {self.robot}: t_fail must come before t_recover')

	def active(self, k: int, sim: SimParams) -> bool:
		''' decided on whole periods so float time never flips the outcome '''
		if k < sim.step_of(self.t_fail): return False
		return self.t_recover is None or k < sim.step_of(self.t_recover)


def down(events: list[FailureEvent], k: int, sim: SimParams) -> set[int]:
	return {event.robot for event in events if event.active(k, sim)}


def _advance_obstacles(obstacles: list[ObstacleState], h: float) -> list[ObstacleState]:
	return [ObstacleState(q=o.q + o.u * h, u=o.u, nu_safety=o.nu_safety) for o in obstacles]


def step_discrete(state: SwarmState, commands: dict[int, Vec2], T: float) -> SwarmState:
	''' p(k+1) = p(k) + T v(k), q(k+1) = q(k) + T u(k) '''
	robots = []
	for robot in state.robots:
		v = commands.get(robot.label, ZERO)
		robots.append(robot.moved(robot.p + v * T, v))
	return SwarmState(state.t + T, robots, _advance_obstacles(state.obstacles, T))


def step_continuous(state: SwarmState, commands: dict[int, Vec2], T: float,
					dt_internal: float | None = None) -> SwarmState:
	''' commands held over the period, Euler sub-steps of dt_internal.
		With dt_internal = T this is exactly `step_discrete`. '''
	n = max(1, round(T / (dt_internal or T)))
	h = T / n
	robots, obstacles = state.robots, state.obstacles
	for _ in range(n):
		robots = [robot.moved(robot.p + commands.get(robot.label, ZERO) * h, commands.get(robot.label, ZERO))
				  for robot in robots]
		obstacles = _advance_obstacles(obstacles, h)
	return SwarmState(state.t + T, robots, obstacles)


def offset_point(p: Vec2, theta: float, d: float) -> Vec2:
	return Vec2(p.x + d * math.cos(theta), p.y + d * math.sin(theta))


def theta_matrix(theta: float, d: float) -> np.ndarray:
	''' maps (upsilon, varpi) to the offset point velocity, det = d '''
	c, s = math.cos(theta), math.sin(theta)
	return np.array([[c, -d * s], [s, d * c]])


def theta_inverse(theta: float, d: float) -> np.ndarray:
	c, s = math.cos(theta), math.sin(theta)
	return np.array([[c, s], [-s / d, c / d]])


def wrap_angle(theta: float) -> float:
	''' into (-pi, pi] '''
	wrapped = math.remainder(theta, 2 * math.pi)
	return math.pi if wrapped == -math.pi else wrapped


def unicycle_inputs(robot: RobotState, vbar: Vec2, params: SimParams) -> tuple[float, float]:
	''' (upsilon, varpi) realising vbar at the offset point, each clamped on its own '''
	if robot.failed:
		return 0.0, 0.0
	upsilon, varpi = theta_inverse(robot.heading, robot.offset_d) @ np.array(vbar)
	return (float(np.clip(upsilon, -params.v_max, params.v_max)),
			float(np.clip(varpi, -params.w_max, params.w_max)))


def wheel_speeds(upsilon: float, varpi: float, l: float) -> tuple[float, float]:
	''' (left, right) wheel speeds for wheelbase l '''
	return upsilon - 0.5 * l * varpi, upsilon + 0.5 * l * varpi


def step_unicycle(state: SwarmState, vbar_commands: dict[int, Vec2], params: SimParams
				  ) -> tuple[SwarmState, dict[int, tuple[float, float]]]:
	''' advance the true positions and headings one period with Euler;
		also returns the applied (upsilon, varpi) per robot '''
	T = params.T
	robots, applied = [], {}
	for robot in state.robots:
		upsilon, varpi = unicycle_inputs(robot, vbar_commands.get(robot.label, ZERO), params)
		heading = robot.heading
		v = Vec2(upsilon * math.cos(heading), upsilon * math.sin(heading))
		robots.append(robot.moved(robot.p + v * T, v, wrap_angle(heading + T * varpi)))
		applied[robot.label] = (upsilon, varpi)
	return SwarmState(state.t + T, robots, _advance_obstacles(state.obstacles, T)), applied


class _Recorder:
	''' collects one row of plain python values per control period,
		the arrays and tables are built once at the end '''

	def __init__(self, robots: list[RobotState], obstacles: list[ObstacleState]):
		self.labels = [robot.label for robot in robots]
		self.n_obstacles = len(obstacles)
		self.t, self.p, self.v, self.points, self.q = [], [], [], [], []
		self.leader, self.head, self.failed, self.applied = [], [], [], []

	def record(self, t: float, state: SwarmState, snapshot: list[RobotState],
			   commands: dict[int, Vec2], assignment: AssignmentState,
			   applied: dict[int, tuple[float, float]] | None) -> None:
		labels = self.labels
		self.t.append(t)
		self.p.append([robot.p for robot in state.robots])
		self.v.append([commands.get(label, ZERO) for label in labels])
		self.leader.append([assignment.leader_of.get(label) or 0 for label in labels])
		self.head.append([assignment.head.get(label, False) for label in labels])
		self.failed.append([robot.failed for robot in state.robots])
		if applied is not None:
			self.applied.append([applied[label] for label in labels])
		# margins are judged on the controlled points, noise free
		self.points.append([robot.p for robot in snapshot])
		self.q.append([obstacle.q for obstacle in state.obstacles])

	def finish(self, robots: list[RobotState], obstacles: list[ObstacleState], kappa1: float) -> TrajectoryLog:
		K, N = len(self.t), len(self.labels)
		t = np.array(self.t, dtype=float)
		p = np.array(self.p, dtype=float).reshape(K, N, 2)
		v = np.array(self.v, dtype=float).reshape(K, N, 2)
		points = np.array(self.points, dtype=float).reshape(K, N, 2)
		q = np.array(self.q, dtype=float).reshape(K, self.n_obstacles, 2)
		leader = np.array(self.leader, dtype=np.int64).reshape(-1)
		failed = np.array(self.failed, dtype=bool).reshape(K, N)

		unicycle = {name: np.full(K * N, np.nan) for name in ('upsilon', 'varpi', 'wl', 'wr')}
		if self.applied:
			applied = np.array(self.applied, dtype=float).reshape(K, N, 2)
			wheelbase = np.array([robot.wheelbase for robot in robots])
			upsilon, varpi = applied[..., 0], applied[..., 1]
			wl, wr = wheel_speeds(upsilon, varpi, wheelbase)
			unicycle = {name: column.reshape(-1) for name, column in
						(('upsilon', upsilon), ('varpi', varpi), ('wl', wl), ('wr', wr))}

		records = pd.DataFrame({
			't': np.repeat(t, N),
			'robot': np.tile(np.array(self.labels, dtype=np.int64), K),
			'x': p[..., 0].reshape(-1), 'y': p[..., 1].reshape(-1),
			'vx': v[..., 0].reshape(-1), 'vy': v[..., 1].reshape(-1),
			'leader': pd.Series(leader, dtype='Int64').mask(leader == 0),
			'head': np.array(self.head, dtype=bool).reshape(-1),
			'failed': failed.reshape(-1),
			**unicycle,
		})[COLUMNS].astype(DTYPES)

		radii = np.array([robot.delta_safety for robot in robots])
		nu = np.array([obstacle.nu_safety for obstacle in obstacles])
		steps = margin_series(points, radii, failed, q, nu, kappa1)
		steps.insert(0, 't', t)
		for m in range(len(obstacles)):
			steps[f'qx_{m + 1}'] = q[:, m, 0]
			steps[f'qy_{m + 1}'] = q[:, m, 1]
		return TrajectoryLog(records, steps)


def measure(state: SwarmState, sim: SimParams, rng: np.random.Generator,
			noisy: bool = True) -> list[RobotState]:
	''' the swarm as the controller sees it: the controlled point of every
		robot, perturbed by measurement noise when configured '''
	unicycle = sim.model == PlantModel.UNICYCLE
	if not unicycle and not (noisy and sim.noise_std > 0):
		return list(state.robots)

	snapshot = []
	for robot in state.robots:
		p = offset_point(robot.p, robot.heading, robot.offset_d) if unicycle else robot.p
		if noisy and sim.noise_std > 0:
			dx, dy = rng.normal(0.0, sim.noise_std, size=2)
			p = Vec2(p.x + float(dx), p.y + float(dy))
		snapshot.append(replace(robot, p=p))
	return snapshot


def banner(scenario: Scenario) -> str:
	sim = scenario.sim
	return f'running {scenario.name}: {len(scenario.robots)} robots, {sim.steps} periods of {sim.T}s ({sim.model})'


def run_scenario(scenario: Scenario) -> TrajectoryLog:
	scenario.validate()
	sim, march, gains = scenario.sim, scenario.march, scenario.gains
	state = scenario.initial_state()
	rng = np.random.default_rng(sim.rng_seed)
	recorder = _Recorder(state.robots, state.obstacles)

	anchor = virtual_structure_anchor(state.robots, march)
	fixed_order = scenario.resolved_order
	net = RingNet()

	def control(snapshot: list[RobotState], obstacles: list[ObstacleState], t: float, k: int):
		if scenario.controller == Controller.VIRTUAL_STRUCTURE:
			commands = virtual_structure_command(snapshot, obstacles, march, gains, t, anchor,
												 scenario.vs_collision_avoidance)
			return AssignmentState.blank(commands), commands
		if scenario.controller == Controller.FIXED_CHAIN:
			commands = fixed_chain_command(snapshot, obstacles, march, gains, t, fixed_order)
			return fixed_chain_assignment(fixed_order), commands
		if scenario.execution == Execution.RING:
			crashed = down(scenario.slice_faults, k, sim)
			avoidance = avoidance_velocities(snapshot, obstacles, gains, t)
			agents = [RingAgent(robot, obstacles, robot.label in crashed, avoidance[robot.label])
					  for robot in snapshot]
			return net.round(agents, march, gains, t, scenario.co_head_rule)
		return assign_and_command(snapshot, obstacles, march, gains, t, scenario.co_head_rule)

	log(banner(scenario))
	for k in range(sim.steps + 1):
		t = k * sim.T
		failed = down(scenario.failures, k, sim)
		robots = [robot if robot.failed == (robot.label in failed) else replace(robot, failed=robot.label in failed)
				  for robot in state.robots]
		state = SwarmState(t, robots, state.obstacles)

		snapshot = measure(state, sim, rng)
		assignment, commands = control(snapshot, state.obstacles, t, k)
		if failed:
			# held ring commands included, a failed robot does not move
			commands = {label: ZERO if label in failed else v for label, v in commands.items()}

		applied = None
		if sim.model == PlantModel.UNICYCLE:
			applied = {robot.label: unicycle_inputs(robot, commands.get(robot.label, ZERO), sim)
					   for robot in state.robots}
		truth = snapshot if sim.noise_std == 0 else measure(state, sim, rng, noisy=False)
		recorder.record(t, state, truth, commands, assignment, applied)

		if k == sim.steps: break
		if sim.model == PlantModel.DISCRETE:
			state = step_discrete(state, commands, sim.T)
		elif sim.model == PlantModel.CONTINUOUS:
			state = step_continuous(state, commands, sim.T, sim.dt_internal)
		else:
			state, _ = step_unicycle(state, commands, sim)

		for robot in state.robots:
			if not (robot.p.is_finite() and math.isfinite(robot.heading)):
				raise SimulationError(f'robot {robot.label} left the finite plane at t={t + sim.T:.6g}s')

	return recorder.finish(state.robots, state.obstacles, gains.kappa1)
