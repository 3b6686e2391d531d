''' One decision round of the line-marching algorithm.

	Every robot starts as a head without follower, leader or velocity. Robots
	then decide in ascending label order: robot i walks the other robots in
	label order and the first non-failed robot ahead of it along e_l that has
	not been claimed yet becomes its leader. Seeing any non-failed robot ahead
	at all means i is not a head. A head marches with v_l; with the co-head
	rule only the smallest-label head does and the others stay still for this
	round. Failed robots never move and are never followed.
'''
from __future__ import annotations
from dataclasses import dataclass, field
from typing import NamedTuple

from .control import MarchSpec, ControlGains, avoidance_velocities, pair_tracking_velocity
from .geometry import Vec2, ZERO
from .shared import AssignmentError
from .swarm import RobotState, ObstacleState


@dataclass(slots=True)
class AssignmentState:
	''' per-label outcome of a decision round, keyed in ascending label order '''
	head			: dict[int, bool] = field(default_factory=dict)
	has_follower	: dict[int, bool] = field(default_factory=dict)
	has_leader		: dict[int, bool] = field(default_factory=dict)
	leader_of		: dict[int, int | None] = field(default_factory=dict)

	@classmethod
	def blank(cls, labels) -> AssignmentState:
		labels = list(labels)
		return cls(
			head = {label: False for label in labels},
			has_follower = {label: False for label in labels},
			has_leader = {label: False for label in labels},
			leader_of = {label: None for label in labels},
		)


class Decision(NamedTuple):
	''' what one robot settles on during its turn '''
	label	: int
	head	: bool
	leader	: int | None
	command	: Vec2


def decide(robot: RobotState, robots: list[RobotState], march: MarchSpec, gains: ControlGains,
		   avoidance: Vec2, claimed: set[int] | frozenset[int], head_seen: bool, co_head_rule: bool) -> Decision:
	''' robot's turn in the round. `robots` is in ascending label order,
		`avoidance` is the robot's collision avoidance velocity for this
		period, `claimed` holds the leaders taken by earlier robots and
		`head_seen` whether an earlier robot already turned out to be a head. '''
	if robot.failed:
		return Decision(robot.label, False, None, ZERO)

	(px, py), (ex, ey) = robot.p, march.e_l
	head = True
	for other in robots:
		if other.label == robot.label or other.failed: continue
		if not (other.p.x - px) * ex + (other.p.y - py) * ey > 0: continue

		head = False
		if other.label not in claimed:
			return Decision(robot.label, False, other.label,
				pair_tracking_velocity(robot.p, other.p, march, gains) + avoidance)

	if head and not (co_head_rule and head_seen):
		return Decision(robot.label, True, None, march.v_l + avoidance)

	# either ahead robots are all taken, or another head has priority
	return Decision(robot.label, head, None, ZERO)


def check_swarm(robots: list[RobotState]) -> list[RobotState]:
	''' returns the robots in ascending label order '''
	if len(robots) == 0:
		raise AssignmentError('a decision round needs at least one robot')
	labels = [robot.label for robot in robots]
	if len(set(labels)) != len(labels):
		duplicates = sorted({label for label in labels if labels.count(label) > 1})
		raise AssignmentError(f'duplicate robot labels: {duplicates}')
	return sorted(robots, key=lambda robot: robot.label)


def apply_decision(state: AssignmentState, decision: Decision) -> None:
	state.head[decision.label] = decision.head
	state.leader_of[decision.label] = decision.leader
	state.has_leader[decision.label] = decision.leader is not None
	if decision.leader is not None:
		state.has_follower[decision.leader] = True


def assign_and_command(robots: list[RobotState], obstacles: list[ObstacleState], march: MarchSpec,
					   gains: ControlGains, t: float, co_head_rule: bool = True,
					   avoidance: dict[int, Vec2] | None = None
					   ) -> tuple[AssignmentState, dict[int, Vec2]]:
	''' `avoidance` is the period's `avoidance_velocities`, computed here when not given '''
	robots = check_swarm(robots)
	if avoidance is None:
		avoidance = avoidance_velocities(robots, obstacles, gains, t)
	state = AssignmentState.blank(robot.label for robot in robots)
	commands = {}

	claimed, head_seen = set(), False
	for robot in robots:
		decision = decide(robot, robots, march, gains, avoidance[robot.label], claimed, head_seen, co_head_rule)
		apply_decision(state, decision)
		commands[robot.label] = decision.command

		if decision.leader is not None: claimed.add(decision.leader)
		head_seen = head_seen or decision.head

	return state, commands
