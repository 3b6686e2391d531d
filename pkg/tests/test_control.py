import math, random, numpy as np, pytest

from linemarch.control import MarchSpec, ControlGains, zeta, perturbation_angle, avoidance_velocities, \
	collision_avoidance_velocity, pair_tracking_velocity
from linemarch.geometry import Vec2, ZERO
from linemarch.shared import ScenarioError
from linemarch.swarm import RobotState, ObstacleState

GAINS = ControlGains(kappa1=1.5, kappa2=10, a=10, omega=1, alpha=10, beta=10)


def test_zeta():
	assert zeta(2.5, 1, 1, 1.5, 10) == pytest.approx(10)
	assert zeta(2.1, 1, 1, 1.5, 10) == pytest.approx(90)
	assert zeta(3.0, 1, 1, 1.5, 10) == pytest.approx(0, abs=1e-12)
	assert zeta(4.0, 1, 1, 1.5, 10) == 0

def test_zeta_inside_safety_boundary():
	''' held at its value just outside the boundary, finite and positive '''
	capped = zeta(2 + 2e-6, 1, 1, 1.5, 10)
	assert zeta(2.0, 1, 1, 1.5, 10) == capped
	assert zeta(0.0, 1, 1, 1.5, 10) == capped
	assert math.isfinite(capped) and capped > 1e6

def test_zeta_continuous_at_cutoff():
	s, kappa1 = 2.0, 1.5
	for eps in (1e-3, 1e-6, 1e-9):
		assert zeta(kappa1 * s - eps, 1, 1, kappa1, 10) == pytest.approx(10 * eps, rel=1e-3)

def test_zeta_strictly_decreasing():
	rng = random.Random(3)
	for _ in range(200):
		a, b = rng.uniform(0.1, 3), rng.uniform(0.1, 12)
		kappa1, kappa2 = rng.uniform(1.05, 3), rng.uniform(0.5, 20)
		s = a + b
		xs = s + (kappa1 - 1) * s * np.linspace(1e-3, 1, 200)
		values = zeta(xs, a, b, kappa1, kappa2)
		assert (np.diff(values) < 0).all()
		assert np.array_equal(values, [zeta(float(x), a, b, kappa1, kappa2) for x in xs])

def test_perturbation_angle():
	assert perturbation_angle(0, GAINS) == 0
	assert perturbation_angle(math.pi / 2, GAINS) == pytest.approx(0.17453, abs=1e-5)
	assert perturbation_angle(3 * math.pi / 2, GAINS) == pytest.approx(-0.17453, abs=1e-5)

def test_collision_avoidance_two_robots():
	robots = [RobotState(1, Vec2(0, 0)), RobotState(2, Vec2(2.5, 0))]
	v = collision_avoidance_velocity(1, robots, [], GAINS, 0.0)
	assert v.x == pytest.approx(-10)
	assert v.y == pytest.approx(0, abs=1e-12)

	v = collision_avoidance_velocity(1, robots, [], GAINS, math.pi / 2)
	assert v.x == pytest.approx(-9.848, abs=1e-3)
	assert v.y == pytest.approx(-1.736, abs=1e-3)

def test_collision_avoidance_far_away():
	robots = [RobotState(1, Vec2(0, 0)), RobotState(2, Vec2(10, 0))]
	obstacles = [ObstacleState(Vec2(0, 50), nu_safety=10)]
	assert collision_avoidance_velocity(1, robots, obstacles, GAINS, 1.3) == ZERO
	with pytest.raises(KeyError):
		collision_avoidance_velocity(3, robots, obstacles, GAINS, 0.0)

def test_failed_robots_still_repel():
	robots = [RobotState(1, Vec2(0, 0)), RobotState(2, Vec2(2.5, 0), failed=True)]
	assert collision_avoidance_velocity(1, robots, [], GAINS, 0.0).x == pytest.approx(-10)
	# and feel the repulsion of the working one
	assert collision_avoidance_velocity(2, robots, [], GAINS, 0.0).x == pytest.approx(10)

def test_obstacle_repulsion():
	robot = RobotState(1, Vec2(0, 0), delta_safety=1)
	obstacle = ObstacleState(Vec2(0, -12), nu_safety=10)
	# 12 from the centre, 1 outside the combined radius of 11
	force = collision_avoidance_velocity(1, [robot], [obstacle], GAINS, 0.0)
	assert force.x == pytest.approx(0, abs=1e-12)
	assert force.y == pytest.approx(10 / 1 - 10 / (0.5 * 11))

def test_per_robot_perturbation():
	robot = RobotState(1, Vec2(0, 0), a=20.0)
	gains = GAINS.for_robot(robot)
	assert gains.a == 20 and gains.omega == GAINS.omega
	assert GAINS.for_robot(RobotState(2, Vec2(0, 0))) is GAINS

def test_pair_tracking():
	march = MarchSpec(v_l=Vec2(2, 0), rho=4)
	assert pair_tracking_velocity(Vec2(0, 0), Vec2(5, 1), march, GAINS) == Vec2(12, 10)

	# on its slot a follower gets v_l
	assert pair_tracking_velocity(Vec2(1, 1), Vec2(5, 1), march, GAINS) == march.v_l
	march = MarchSpec(v_l=Vec2(-8, 12), rho=4)
	p_i = Vec2(1.25, -3.5)
	v = pair_tracking_velocity(p_i, p_i + march.e_l * march.rho, march, GAINS)
	assert v.x == pytest.approx(-8) and v.y == pytest.approx(12)

def test_pair_tracking_lateral_only():
	march = MarchSpec(v_l=Vec2(0, 3), rho=4)
	p_j = march.e_l * 4 + march.e_l_perp * 0.5
	v = pair_tracking_velocity(ZERO, p_j, march, GAINS)
	expected = march.v_l + march.e_l_perp * (GAINS.beta * 0.5)
	assert v.x == pytest.approx(expected.x)
	assert v.y == pytest.approx(expected.y)

def test_march_spec():
	march = MarchSpec(v_l=[-8, 12], rho=4)
	assert march.v_l == Vec2(-8, 12)
	assert march.e_l_perp == Vec2(-march.e_l.y, march.e_l.x)

	with pytest.raises(ScenarioError):
		MarchSpec(v_l=Vec2(0, 0), rho=4)
	with pytest.raises(ScenarioError):
		MarchSpec(v_l=Vec2(1, 0), rho=0)
	with pytest.raises(ScenarioError):
		ControlGains(kappa1=1.0)
	with pytest.raises(ScenarioError):
		ControlGains(alpha=-1)

def test_avoidance_matches_pairwise_sum():
	''' the one-pass field against the sum written out pair by pair '''
	rng = random.Random(8)
	for _ in range(200):
		robots = [
			RobotState(k + 1, Vec2(rng.uniform(-6, 6), rng.uniform(-6, 6)),
					   delta_safety=rng.choice([0.5, 1.0]), failed=rng.random() < 0.2,
					   a=rng.choice([None, 25.0]))
			for k in range(rng.randint(1, 10))
		]
		obstacles = [ObstacleState(Vec2(rng.uniform(-15, 15), rng.uniform(-15, 15)), nu_safety=3.0)]
		t = rng.uniform(0, 20)
		field = avoidance_velocities(robots, obstacles, GAINS, t)
		assert list(field) == sorted(robot.label for robot in robots)

		for robot in robots:
			others = [(other.p, other.delta_safety) for other in robots if other.label != robot.label]
			others += [(obstacle.q, obstacle.nu_safety) for obstacle in obstacles]
			fx = fy = 0.0
			for p, radius in others:
				dx, dy = robot.p.x - p.x, robot.p.y - p.y
				d = math.hypot(dx, dy)
				if d > GAINS.kappa1 * (robot.delta_safety + radius): continue
				magnitude = zeta(d, robot.delta_safety, radius, GAINS.kappa1, GAINS.kappa2)
				fx, fy = fx + dx / d * magnitude, fy + dy / d * magnitude

			theta = perturbation_angle(t, GAINS.for_robot(robot))
			expected = Vec2(math.cos(theta) * fx - math.sin(theta) * fy, math.sin(theta) * fx + math.cos(theta) * fy)
			v = field[robot.label]
			assert v.x == pytest.approx(expected.x, rel=1e-9, abs=1e-6)
			assert v.y == pytest.approx(expected.y, rel=1e-9, abs=1e-6)
			assert collision_avoidance_velocity(robot.label, robots, obstacles, GAINS, t) == v

def test_pair_tracking_is_affine():
	''' affine in p_j - p_i: superposition and scaling of the offsets from the
		on-slot command, and blind to where the pair sits '''
	rng = random.Random(5)
	march = MarchSpec(v_l=Vec2(-8, 12), rho=4)
	random_vec = lambda: Vec2(rng.uniform(-10, 10), rng.uniform(-10, 10))
	slot = march.e_l * march.rho

	for _ in range(500):
		p_i, d1, d2, shift = random_vec(), random_vec(), random_vec(), random_vec()
		scale = rng.uniform(-3, 3)
		g = lambda offset: pair_tracking_velocity(p_i, p_i + slot + offset, march, GAINS) - march.v_l

		both, one, two = g(d1 + d2), g(d1), g(d2)
		assert both.x == pytest.approx(one.x + two.x, abs=1e-9)
		assert both.y == pytest.approx(one.y + two.y, abs=1e-9)
		scaled = g(d1 * scale)
		assert scaled.x == pytest.approx(one.x * scale, abs=1e-9)
		assert scaled.y == pytest.approx(one.y * scale, abs=1e-9)

		moved = pair_tracking_velocity(p_i + shift, p_i + slot + d1 + shift, march, GAINS) - march.v_l
		assert moved.x == pytest.approx(one.x, abs=1e-9)
		assert moved.y == pytest.approx(one.y, abs=1e-9)
