''' The two comparison controllers. Both keep the label -> place mapping fixed
	for the whole run and share the collision avoidance term of the dynamic
	controller, so the assignment policy is the only thing that differs.
'''
from __future__ import annotations
try:
	from enum import StrEnum
except ImportError:  # Python < 3.11
	from enum import Enum

	class StrEnum(str, Enum):
		__str__ = str.__str__
		__format__ = str.__format__

from .assignment import AssignmentState
from .control import MarchSpec, ControlGains, avoidance_velocities, pair_tracking_velocity
from .geometry import Vec2, ZERO
from .shared import ScenarioError
from .swarm import RobotState, ObstacleState


class Controller(StrEnum):
	DYNAMIC = 'dynamic'
	VIRTUAL_STRUCTURE = 'virtual_structure'
	FIXED_CHAIN = 'fixed_chain'


def virtual_structure_anchor(robots: list[RobotState], march: MarchSpec) -> Vec2:
	''' c(0): the virtual leader placed where the label-fixed slots
		c - (i-1) rho e_l fit the initial positions best (least squares) '''
	total = ZERO
	for robot in robots:
		total = total + robot.p + march.e_l * ((robot.label - 1) * march.rho)
	return total / len(robots)


def virtual_structure_command(robots: list[RobotState], obstacles: list[ObstacleState], march: MarchSpec,
							  gains: ControlGains, t: float, anchor: Vec2,
							  collision_avoidance: bool = True) -> dict[int, Vec2]:
	''' every robot tracks its slot on a rigid line dragged along at v_l.
		A failed robot keeps its slot reserved, the others do not close the gap. '''
	leader = anchor + march.v_l * t
	avoidance = avoidance_velocities(robots, obstacles, gains, t) if collision_avoidance else None
	commands = {}
	for robot in sorted(robots, key=lambda robot: robot.label):
		if robot.failed:
			commands[robot.label] = ZERO
			continue

		slot = leader - march.e_l * ((robot.label - 1) * march.rho)
		command = march.v_l + (slot - robot.p) * gains.alpha
		if collision_avoidance:
			command = command + avoidance[robot.label]
		commands[robot.label] = command
	return commands


def check_fixed_order(fixed_order: list[int], labels) -> list[int]:
	if sorted(fixed_order) != sorted(labels):
		raise ScenarioError(f'fixed_order must be a permutation of the robot labels, got {fixed_order}')
	return list(fixed_order)


def fixed_chain_command(robots: list[RobotState], obstacles: list[ObstacleState], march: MarchSpec,
						gains: ControlGains, t: float, fixed_order: list[int]) -> dict[int, Vec2]:
	''' the first robot in `fixed_order` heads, every other one tracks its
		predecessor in the order, failed or not '''
	by_label = {robot.label: robot for robot in robots}
	avoidance = avoidance_velocities(robots, obstacles, gains, t)
	commands = {}
	for k, label in enumerate(fixed_order):
		robot = by_label[label]
		if robot.failed:
			command = ZERO
		elif k == 0:
			command = march.v_l + avoidance[label]
		else:
			leader = by_label[fixed_order[k - 1]]
			command = pair_tracking_velocity(robot.p, leader.p, march, gains) \
				+ avoidance[label]
		commands[label] = command
	return dict(sorted(commands.items()))


def fixed_chain_assignment(fixed_order: list[int]) -> AssignmentState:
	''' the chain never changes, so neither does its bookkeeping '''
	state = AssignmentState.blank(sorted(fixed_order))
	state.head[fixed_order[0]] = True
	for leader, follower in zip(fixed_order, fixed_order[1:]):
		state.leader_of[follower] = leader
		state.has_leader[follower] = True
		state.has_follower[leader] = True
	return state
