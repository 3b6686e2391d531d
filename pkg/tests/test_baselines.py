import pytest

from linemarch.baselines import virtual_structure_anchor, virtual_structure_command, fixed_chain_command, \
	fixed_chain_assignment, check_fixed_order
from linemarch.control import MarchSpec, ControlGains, pair_tracking_velocity
from linemarch.geometry import Vec2, ZERO
from linemarch.shared import ScenarioError
from linemarch.swarm import RobotState

MARCH = MarchSpec(v_l=Vec2(2, 0), rho=4)
GAINS = ControlGains()
ON_SLOTS = [RobotState(1, Vec2(8, 0)), RobotState(2, Vec2(4, 0)), RobotState(3, Vec2(0, 0))]


def test_anchor():
	assert virtual_structure_anchor(ON_SLOTS, MARCH) == Vec2(8, 0)

def test_virtual_structure_on_slots():
	anchor = virtual_structure_anchor(ON_SLOTS, MARCH)
	assert virtual_structure_command(ON_SLOTS, [], MARCH, GAINS, 0.0, anchor) == {1: MARCH.v_l, 2: MARCH.v_l, 3: MARCH.v_l}

	# the structure moves on at v_l, a robot left behind is pulled after it
	commands = virtual_structure_command(ON_SLOTS, [], MARCH, GAINS, 0.5, anchor)
	assert commands[1] == Vec2(2 + GAINS.alpha * 1.0, 0)

def test_virtual_structure_lateral_error():
	robots = [ON_SLOTS[0], RobotState(2, Vec2(4, 0.5)), ON_SLOTS[2]]
	commands = virtual_structure_command(robots, [], MARCH, GAINS, 0.0, Vec2(8, 0))
	assert commands[2] == Vec2(2, -0.5 * GAINS.alpha)

def test_virtual_structure_keeps_failed_slot():
	robots = [ON_SLOTS[0], RobotState(2, Vec2(4, 0), failed=True), RobotState(3, Vec2(1, 0))]
	commands = virtual_structure_command(robots, [], MARCH, GAINS, 0.0, Vec2(8, 0))
	assert commands[2] == ZERO
	# robot 3 keeps heading for its own slot at x=0, it does not close up on robot 1
	assert commands[3].x == pytest.approx(2 - GAINS.alpha)

def test_virtual_structure_labels_not_positions():
	''' swapping two robots' positions swaps nothing in their slots '''
	swapped = [RobotState(1, Vec2(4, 0)), RobotState(2, Vec2(8, 0)), ON_SLOTS[2]]
	commands = virtual_structure_command(swapped, [], MARCH, GAINS, 0.0, Vec2(8, 0), collision_avoidance=False)
	assert commands[1] == Vec2(2 + 4 * GAINS.alpha, 0)
	assert commands[2] == Vec2(2 - 4 * GAINS.alpha, 0)

def test_fixed_chain():
	order = [1, 2, 3]
	commands = fixed_chain_command(ON_SLOTS, [], MARCH, GAINS, 0.0, order)
	assert commands == {1: MARCH.v_l, 2: MARCH.v_l, 3: MARCH.v_l}

	# robot 3 keeps following its failed predecessor
	robots = [ON_SLOTS[0], RobotState(2, Vec2(4, 0), failed=True), RobotState(3, Vec2(-3, 0))]
	commands = fixed_chain_command(robots, [], MARCH, GAINS, 0.0, order)
	assert commands[2] == ZERO
	assert commands[3] == pair_tracking_velocity(Vec2(-3, 0), Vec2(4, 0), MARCH, GAINS)

def test_fixed_chain_single_robot():
	assert fixed_chain_command([RobotState(1, Vec2(3, 3))], [], MARCH, GAINS, 0.0, [1]) == {1: MARCH.v_l}

def test_fixed_chain_assignment():
	state = fixed_chain_assignment([2, 1, 3])
	assert state.head == {1: False, 2: True, 3: False}
	assert state.leader_of == {1: 2, 2: None, 3: 1}
	assert state.has_follower == {1: True, 2: True, 3: False}

def test_fixed_order_must_be_permutation():
	assert check_fixed_order([3, 1, 2], [1, 2, 3]) == [3, 1, 2]
	with pytest.raises(ScenarioError):
		check_fixed_order([1, 1, 2], [1, 2, 3])
	with pytest.raises(ScenarioError):
		check_fixed_order([1, 2], [1, 2, 3])
