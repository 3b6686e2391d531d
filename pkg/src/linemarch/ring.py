''' Decentralized execution of a decision round.

	Each robot is an isolated agent that only knows its own state and the
	obstacles it senses. Agents share one cyclic communication loop: first
	every agent puts its beacon (position, safety radius, failure flag) on the
	message, then each agent in ascending label order gets its time slice,
	decides against the message contents and passes on the updated message.
	The outcome is bit-identical to `assign_and_command` on the same snapshot,
	because every slice runs the very same `decide`.
'''
from __future__ import annotations
from dataclasses import dataclass, field, replace

from .assignment import AssignmentState, Decision, decide, apply_decision, check_swarm
from .control import MarchSpec, ControlGains, avoidance_velocities
from .geometry import Vec2, ZERO
from .shared import log, RED, RESET
from .swarm import RobotState, ObstacleState


class SliceMissing(RuntimeError):
	''' an agent did not take its time slice (crash, distinct from robot failure) '''
	def __init__(self, label: int):
		super().__init__(f'agent {label} missed its time slice')
		self.label = label


@dataclass(frozen=True)
class RingMessage:
	''' what travels around the loop. `claimed_followers` only ever grows '''
	sender				: int | None = None
	positions_known		: dict[int, Vec2] = field(default_factory=dict)
	safety_radii		: dict[int, float] = field(default_factory=dict)
	claimed_followers	: frozenset[int] = frozenset()
	failed_set			: frozenset[int] = frozenset()
	head_seen			: bool = False


@dataclass
class RingAgent:
	robot		: RobotState
	obstacles	: list[ObstacleState] = field(default_factory=list)
	crashed		: bool = False
	# own collision avoidance velocity when sensed on board, else derived from the message
	avoidance	: Vec2 | None = None

	@property
	def label(self) -> int:
		return self.robot.label

	def beacon(self, message: RingMessage) -> RingMessage:
		''' announce own position, radius and failure flag '''
		return replace(message,
			sender = self.label,
			positions_known = {**message.positions_known, self.label: self.robot.p},
			safety_radii = {**message.safety_radii, self.label: self.robot.delta_safety},
			failed_set = message.failed_set | {self.label} if self.robot.failed else message.failed_set,
		)

	def take_slice(self, message: RingMessage, march: MarchSpec, gains: ControlGains, t: float,
				   co_head_rule: bool) -> tuple[Decision, RingMessage]:
		if self.crashed:
			raise SliceMissing(self.label)

		# the swarm as this agent knows it: itself plus what came round the loop
		robots = [
			self.robot if label == self.label else RobotState(
				label = label,
				p = p,
				delta_safety = message.safety_radii[label],
				failed = label in message.failed_set,
			)
			for label, p in sorted(message.positions_known.items())
		]
		avoidance = self.avoidance
		if avoidance is None:
			avoidance = avoidance_velocities(robots, self.obstacles, gains, t)[self.label]
		decision = decide(self.robot, robots, march, gains, avoidance,
						  message.claimed_followers, message.head_seen, co_head_rule)

		claimed = message.claimed_followers
		if decision.leader is not None: claimed = claimed | {decision.leader}

		return decision, replace(message,
			sender = self.label,
			claimed_followers = claimed,
			head_seen = message.head_seen or decision.head,
		)


class RingNet:
	''' the loop itself; remembers the last completed round so a round with a
		missing slice can fall back to the previous commands '''

	def __init__(self):
		self.previous : tuple[AssignmentState, dict[int, Vec2]] | None = None
		self.slices_run = 0
		self.aborted_rounds = 0

	def round(self, agents: list[RingAgent], march: MarchSpec, gains: ControlGains, t: float,
			  co_head_rule: bool = True) -> tuple[AssignmentState, dict[int, Vec2]]:
		agents = sorted(agents, key=lambda agent: agent.label)
		check_swarm([agent.robot for agent in agents])

		message = RingMessage()
		for agent in agents:
			message = agent.beacon(message)

		state = AssignmentState.blank(agent.label for agent in agents)
		commands = {}
		try:
			for agent in agents:
				decision, message = agent.take_slice(message, march, gains, t, co_head_rule)
				self.slices_run += 1
				apply_decision(state, decision)
				commands[agent.label] = decision.command

		except SliceMissing as e:
			self.aborted_rounds += 1
			log(f'{RED}t={t:.3f}s: {e}, holding previous commands{RESET}')
			if self.previous is None:
				return state, {agent.label: ZERO for agent in agents}
			return self.previous

		self.previous = (state, commands)
		return state, commands


def ring_round(agents: list[RingAgent], march: MarchSpec, gains: ControlGains, t: float,
			   co_head_rule: bool = True, net: RingNet | None = None
			   ) -> tuple[AssignmentState, dict[int, Vec2]]:
	return (net or RingNet()).round(agents, march, gains, t, co_head_rule)
