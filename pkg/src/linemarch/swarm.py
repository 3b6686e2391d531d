from __future__ import annotations
from dataclasses import dataclass, field

from .geometry import Vec2, ZERO


@dataclass(slots=True)
class RobotState:
	''' One robot at one instant. `p` is whatever point the controller acts
		on: the true position for point robots, the offset point for unicycles
		when the snapshot is built for a decision round.

		- `failed`       Gamma_i inverted, a failed robot does not move
		- `heading`      unicycle only
		- `wheelbase`    unicycle only, distance between the wheels
		- `offset_d`     unicycle only, distance of the controlled point
		- `a`, `omega`   per-robot perturbation overrides, None uses the gains
	'''
	label		: int
	p			: Vec2
	v			: Vec2 = ZERO
	delta_safety: float = 1.0
	failed		: bool = False
	heading		: float = 0.0
	wheelbase	: float = 0.16
	offset_d	: float = 0.2
	a			: float | None = None
	omega		: float | None = None

	def moved(self, p: Vec2, v: Vec2, heading: float | None = None) -> RobotState:
		''' the same robot after a step: new position, velocity and optionally heading '''
		return RobotState(self.label, p, v, self.delta_safety, self.failed,
						  self.heading if heading is None else heading,
						  self.wheelbase, self.offset_d, self.a, self.omega)


@dataclass(slots=True)
class ObstacleState:
	q			: Vec2
	u			: Vec2 = ZERO
	nu_safety	: float = 1.0


@dataclass(slots=True)
class SwarmState:
	''' true plant state at time t '''
	t			: float
	robots		: list[RobotState] = field(default_factory=list)
	obstacles	: list[ObstacleState] = field(default_factory=list)
