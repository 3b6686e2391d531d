''' Built-in scenarios, parameter sets as published for the line-marching
	experiments: ten point robots meeting a fast obstacle, the three-way
	failure comparison, the four-phase discrete-time run and the four-phase
	unicycle run.
'''
from functools import partial

from .baselines import Controller
from .control import MarchSpec, ControlGains
from .engine import SimParams, FailureEvent, PlantModel
from .geometry import Vec2
from .scenario import Scenario
from .swarm import RobotState, ObstacleState

SCATTERED = [(-5, 10), (1, 20), (-10, 5), (5, 10), (10, 5), (0, 10), (5, -10), (15, -5), (-5, -10), (-10, -5)]

# already (roughly) in line; robot 9 is published at (2.5, -17), far off the
# line of the others, most likely a sign slip for (2.5, 17)
IN_LINE = [(-12, 40), (-15, 44), (-10, 37), (-8, 34), (-6, 30), (-4, 27), (-1.5, 24), (0.5, 20.5), (2.5, -17), (5, 14)]
IN_LINE_CORRECTED = IN_LINE[:8] + [(2.5, 17)] + IN_LINE[9:]

UNICYCLE_START = [(-4, 8), (0, 12), (-8, 4), (4, 8), (8, 4), (0, 8), (4, -8), (12, -4), (-4, -8), (-8, -4)]

POINT_MARCH = dict(v_l=Vec2(-8.0, 12.0), rho=4.0)
POINT_GAINS = dict(kappa1=1.5, kappa2=10.0, a=10.0, omega=1.0, alpha=10.0, beta=10.0)


def _robots(positions, **kwargs) -> list[RobotState]:
	return [RobotState(label=k + 1, p=Vec2(float(x), float(y)), **kwargs) for k, (x, y) in enumerate(positions)]


def case_a() -> Scenario:
	''' form a line from scattered positions while a big obstacle crosses at 15 m/s '''
	return Scenario(
		name = 'case-a',
		march = MarchSpec(**POINT_MARCH),
		gains = ControlGains(**POINT_GAINS),
		sim = SimParams(model=PlantModel.CONTINUOUS, T=0.001, duration=30.0),
		robots = _robots(SCATTERED, delta_safety=1.0),
		obstacles = [ObstacleState(q=Vec2(-90.0, 60.0), u=Vec2(15.0, 0.0), nu_safety=10.0)],
	)


def case_b(controller: Controller, corrected: bool = False) -> Scenario:
	''' robot 4 fails at t=1s in a line that is already (nearly) formed '''
	suffix = {Controller.DYNAMIC: 'dynamic', Controller.VIRTUAL_STRUCTURE: 'vs', Controller.FIXED_CHAIN: 'fixed'}
	return Scenario(
		name = f'case-b-{suffix[controller]}' + ('-corrected' if corrected else ''),
		march = MarchSpec(**POINT_MARCH),
		gains = ControlGains(**POINT_GAINS),
		sim = SimParams(model=PlantModel.CONTINUOUS, T=0.001, duration=20.0),
		robots = _robots(IN_LINE_CORRECTED if corrected else IN_LINE, delta_safety=1.0),
		failures = [FailureEvent(robot=4, t_fail=1.0)],
		controller = controller,
		fixed_order = list(range(1, 11)) if controller == Controller.FIXED_CHAIN else None,
	)


def discrete_four_phase() -> Scenario:
	''' k = 0..15000 at T = 1ms: form, bypass the obstacle, lose robot 4 on
		[8000, 11000), take it back '''
	return Scenario(
		name = 'discrete-4phase',
		march = MarchSpec(**POINT_MARCH),
		gains = ControlGains(**POINT_GAINS),
		sim = SimParams(model=PlantModel.DISCRETE, T=0.001, duration=15.0),
		robots = _robots(SCATTERED, delta_safety=1.0),
		obstacles = [ObstacleState(q=Vec2(-80.0, 60.0), u=Vec2(15.0, 0.0), nu_safety=10.0)],
		failures = [FailureEvent(robot=4, t_fail=8.0, t_recover=11.0)],
	)


def unicycle_four_phase() -> Scenario:
	''' differential drive robots through their offset points: form (0-54s),
		bypass (54-130s), robot 6 down (130-160s), rejoin (160-218.8s).
		Noise is off so the run is reproducible without a seed, heads are not
		arbitrated (noise would break co-head ties on real robots). '''
	return Scenario(
		name = 'unicycle-4phase',
		march = MarchSpec(v_l=Vec2(-0.25, 0.433), rho=2.0),
		gains = ControlGains(kappa1=2.5, kappa2=10.0, a=10.0, omega=0.3, alpha=1.0, beta=0.5),
		sim = SimParams(model=PlantModel.UNICYCLE, T=0.02, duration=218.8, v_max=1.0, w_max=2.0),
		robots = _robots(UNICYCLE_START, delta_safety=0.35, heading=0.0, wheelbase=0.16, offset_d=0.2),
		obstacles = [ObstacleState(q=Vec2(-30.0, 23.0), u=Vec2(0.2133, 0.211), nu_safety=2.0)],
		failures = [FailureEvent(robot=6, t_fail=130.0, t_recover=160.0)],
		co_head_rule = False,
	)


BUILTIN = {
	'case-a': case_a,
	'case-b': partial(case_b, Controller.DYNAMIC),
	'case-b-dynamic': partial(case_b, Controller.DYNAMIC),
	'case-b-vs': partial(case_b, Controller.VIRTUAL_STRUCTURE),
	'case-b-fixed': partial(case_b, Controller.FIXED_CHAIN),
	'case-b-corrected': partial(case_b, Controller.DYNAMIC, corrected=True),
	'case-b-dynamic-corrected': partial(case_b, Controller.DYNAMIC, corrected=True),
	'case-b-vs-corrected': partial(case_b, Controller.VIRTUAL_STRUCTURE, corrected=True),
	'case-b-fixed-corrected': partial(case_b, Controller.FIXED_CHAIN, corrected=True),
	'discrete-4phase': discrete_four_phase,
	'unicycle-4phase': unicycle_four_phase,
}
