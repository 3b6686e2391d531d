''' The velocity building blocks every controller is made of:
	the repulsive magnitude `zeta`, the perturbed collision avoidance term
	and the pairwise line-marching tracking term.
'''
from __future__ import annotations
from dataclasses import dataclass, field, replace

import math, numpy as np

from .geometry import Vec2, ZERO, gamma, rotate
from .shared import EPS_ZERO, ScenarioError
from .swarm import RobotState, ObstacleState


@dataclass(frozen=True)
class MarchSpec:
	''' marching velocity v_l and desired spacing rho;
		e_l and e_l_perp are derived and never passed in '''
	v_l			: Vec2
	rho			: float
	e_l			: Vec2 = field(init=False)
	e_l_perp	: Vec2 = field(init=False)

	def __post_init__(self):
		v_l = Vec2.parse(self.v_l)
		if not v_l.is_finite() or v_l.norm() <= 0:
			raise ScenarioError(f'march.v_l must be a nonzero finite vector, got {self.v_l}')
		if not self.rho > 0:
			raise ScenarioError(f'march.rho must be positive, got {self.rho}')

		e_l = gamma(v_l)
		object.__setattr__(self, 'v_l', v_l)
		object.__setattr__(self, 'e_l', e_l)
		# the quarter turn of e_l written out, so an on-slot follower gets exactly v_l
		object.__setattr__(self, 'e_l_perp', Vec2(-e_l.y, e_l.x))


@dataclass(frozen=True)
class ControlGains:
	''' kappa1 > 1 and kappa2 shape the repulsion, `a` (degrees) and `omega`
		(rad/s) the perturbation, alpha and beta the along/across tracking '''
	kappa1	: float = 1.5
	kappa2	: float = 10.0
	a		: float = 10.0
	omega	: float = 1.0
	alpha	: float = 10.0
	beta	: float = 10.0

	def __post_init__(self):
		if not self.kappa1 > 1:
			raise ScenarioError(f'gains.kappa1 must exceed 1, got {self.kappa1}')
		for name in ('kappa2', 'a', 'omega', 'alpha', 'beta'):
			if not getattr(self, name) > 0:
				raise ScenarioError(f'gains.{name} must be positive, got {getattr(self, name)}')

	def for_robot(self, robot: RobotState) -> ControlGains:
		''' resolve the per-robot perturbation overrides '''
		if robot.a is None and robot.omega is None:
			return self
		return replace(self,
			a = self.a if robot.a is None else robot.a,
			omega = self.omega if robot.omega is None else robot.omega,
		)


def zeta(x, a, b, kappa1: float, kappa2: float):
	''' repulsive magnitude between two discs of radii a and b at distance x.
		Zero beyond kappa1 (a+b); inside the safety boundary the value is held
		at its level just outside it, 1e-6 (a+b) away. Elementwise on arrays,
		a float for scalars. '''
	s = a + b
	held = np.where(x <= s, s + 1e-6 * s, x)
	value = np.where(x > kappa1 * s, 0.0, kappa2 / (held - s) - kappa2 / ((kappa1 - 1) * s))
	return float(value) if np.ndim(value) == 0 else value


def perturbation_angle(t: float, gains: ControlGains) -> float:
	return gains.a * (math.pi / 180) * math.sin(gains.omega * t)


def _repulsion_sum(p: np.ndarray, a: np.ndarray, q: np.ndarray, b: np.ndarray, gains: ControlGains,
				   pairs_with_self: bool = False) -> np.ndarray | None:
	''' summed gamma(p_i - q_j) zeta(|p_i - q_j|, a_i, b_j) over j, (N, 2).
		None when no pair is inside its cut-off. '''
	diff = p[:, None, :] - q[None, :, :]
	d = np.hypot(diff[..., 0], diff[..., 1])
	s = a[:, None] + b[None, :]
	near = d <= gains.kappa1 * s
	if pairs_with_self:
		np.fill_diagonal(near, False)
	if not near.any():
		return None

	magnitude = np.where(near, zeta(d, a[:, None], b[None, :], gains.kappa1, gains.kappa2), 0.0)
	has_direction = d >= EPS_ZERO
	unit = diff / np.where(has_direction, d, 1.0)[..., None]
	weight = np.where(has_direction, magnitude, 0.0)
	return (unit * weight[..., None]).sum(axis=1)


def avoidance_velocities(robots: list[RobotState], obstacles: list[ObstacleState],
						 gains: ControlGains, t: float) -> dict[int, Vec2]:
	''' v_ca of every robot, keyed by label: the repulsion of all other robots
		(failed ones included) and all obstacles, swung by the robot's own
		perturbation angle. One pass over the (N, N) and (N, M) distances. '''
	robots = sorted(robots, key=lambda robot: robot.label)
	if len(robots) == 0:
		return {}

	p = np.array([robot.p for robot in robots], dtype=float)
	radius = np.array([robot.delta_safety for robot in robots], dtype=float)
	force = _repulsion_sum(p, radius, p, radius, gains, pairs_with_self=True)
	if obstacles:
		q = np.array([obstacle.q for obstacle in obstacles], dtype=float)
		nu = np.array([obstacle.nu_safety for obstacle in obstacles], dtype=float)
		from_obstacles = _repulsion_sum(p, radius, q, nu, gains)
		if from_obstacles is not None:
			force = from_obstacles if force is None else force + from_obstacles

	if force is None:
		return dict.fromkeys((robot.label for robot in robots), ZERO)

	velocities = {}
	for robot, (fx, fy) in zip(robots, force.tolist()):
		if fx == 0 and fy == 0:
			velocities[robot.label] = ZERO
		else:
			velocities[robot.label] = rotate(perturbation_angle(t, gains.for_robot(robot)), Vec2(fx, fy))
	return velocities


def collision_avoidance_velocity(i: int, robots: list[RobotState], obstacles: list[ObstacleState],
								 gains: ControlGains, t: float) -> Vec2:
	''' v_ca of the robot with label i '''
	velocities = avoidance_velocities(robots, obstacles, gains, t)
	if i not in velocities:
		raise KeyError(f'no robot with label {i}')
	return velocities[i]


def pair_tracking_velocity(p_i: Vec2, p_j: Vec2, march: MarchSpec, gains: ControlGains) -> Vec2:
	''' velocity that brings robot i to the slot rho behind leader j along e_l '''
	(vx, vy), (ex, ey), (nx, ny) = march.v_l, march.e_l, march.e_l_perp
	dx, dy = p_j.x - p_i.x, p_j.y - p_i.y
	along = gains.alpha * (dx * ex + dy * ey - march.rho)
	across = gains.beta * (dx * nx + dy * ny)
	return Vec2(vx + ex * along + nx * across, vy + ey * along + ny * across)
