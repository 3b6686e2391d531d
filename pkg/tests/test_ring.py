import random

from linemarch.assignment import assign_and_command
from linemarch.control import MarchSpec, ControlGains
from linemarch.geometry import Vec2, ZERO
from linemarch.ring import RingAgent, RingNet, RingMessage, ring_round
from linemarch.swarm import RobotState, ObstacleState

MARCH = MarchSpec(v_l=Vec2(-8, 12), rho=4)
GAINS = ControlGains()


def agents_for(robots, obstacles=(), crashed=()):
	return [RingAgent(robot, list(obstacles), robot.label in crashed) for robot in robots]


def same(a, b) -> bool:
	''' bit-exact: dataclass equality plus exact float commands '''
	(state_a, commands_a), (state_b, commands_b) = a, b
	return state_a == state_b and commands_a == commands_b


def test_three_robot_chain():
	march = MarchSpec(v_l=Vec2(2, 0), rho=4)
	robots = [RobotState(1, Vec2(0, 0)), RobotState(2, Vec2(2, 0)), RobotState(3, Vec2(4, 0))]
	assert same(
		ring_round(agents_for(robots), march, GAINS, 0.3),
		assign_and_command(robots, [], march, GAINS, 0.3),
	)

def test_single_agent():
	robots = [RobotState(1, Vec2(1, 1))]
	assert same(ring_round(agents_for(robots), MARCH, GAINS, 0.0), assign_and_command(robots, [], MARCH, GAINS, 0.0))

def test_random_snapshots():
	rng = random.Random(11)
	for _ in range(1000):
		robots = [
			RobotState(k + 1, Vec2(rng.uniform(-15, 15), rng.uniform(-15, 15)),
					   delta_safety=rng.choice([0.5, 1.0]), failed=rng.random() < 0.15)
			for k in range(10)
		]
		rng.shuffle(robots)
		obstacles = [ObstacleState(Vec2(rng.uniform(-20, 20), rng.uniform(-20, 20)), Vec2(15, 0), 3.0)]
		t = rng.uniform(0, 30)
		co_head_rule = rng.random() < 0.5

		assert same(
			ring_round(agents_for(robots, obstacles), MARCH, GAINS, t, co_head_rule),
			assign_and_command(robots, obstacles, MARCH, GAINS, t, co_head_rule),
		)

def test_message():
	robots = [RobotState(1, Vec2(0, 0)), RobotState(2, Vec2(5, 0), failed=True)]
	message = RingMessage()
	for agent in agents_for(robots):
		message = agent.beacon(message)

	assert message.sender == 2
	assert message.positions_known == {1: Vec2(0, 0), 2: Vec2(5, 0)}
	assert message.failed_set == {2}
	assert message.claimed_followers == frozenset()

def test_missed_slice_holds_previous_commands():
	march = MarchSpec(v_l=Vec2(2, 0), rho=4)
	net = RingNet()
	robots = [RobotState(1, Vec2(0, 0)), RobotState(2, Vec2(4, 0))]

	first = net.round(agents_for(robots), march, GAINS, 0.0)
	assert net.slices_run == 2

	moved = [RobotState(1, Vec2(1, 0)), RobotState(2, Vec2(4, 0))]
	held = net.round(agents_for(moved, crashed=[2]), march, GAINS, 0.001)
	assert held == first
	assert net.aborted_rounds == 1

def test_missed_slice_without_history():
	robots = [RobotState(1, Vec2(0, 0)), RobotState(2, Vec2(4, 0))]
	_, commands = RingNet().round(agents_for(robots, crashed=[1]), MARCH, GAINS, 0.0)
	assert commands == {1: ZERO, 2: ZERO}
