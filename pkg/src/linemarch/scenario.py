''' Scenarios: one dataclass describing an experiment end to end, its json
	form, validation and `section.field=value` overrides.

	```json
	{
		"name": "mine",
		"march": {"v_l": [-8, 12], "rho": 4},
		"gains": {"kappa1": 1.5, "kappa2": 10, "a": 10, "omega": 1, "alpha": 10, "beta": 10},
		"sim": {"model": "continuous", "T": 0.001, "duration": 30},
		"robots": [{"label": 1, "p": [-5, 10], "delta_safety": 1}],
		"obstacles": [{"q": [-90, 60], "u": [15, 0], "nu_safety": 10}],
		"failures": [{"robot": 1, "t_fail": 1.0, "t_recover": null}],
		"controller": "dynamic", "execution": "centralized", "co_head_rule": true
	}
	```
'''
from dataclasses import dataclass, field, fields, replace, is_dataclass
from enum import Enum
from pathlib import Path
from types import UnionType, NoneType
from typing import Any, Union, get_type_hints, get_origin, get_args

import json, math

from .baselines import Controller, check_fixed_order
from .control import MarchSpec, ControlGains
from .engine import SimParams, FailureEvent, PlantModel, Execution
from .geometry import Vec2
from .shared import ScenarioError, ScenarioParseError
from .swarm import RobotState, ObstacleState, SwarmState


@dataclass
class Scenario:
	name					: str
	march					: MarchSpec
	gains					: ControlGains = field(default_factory=ControlGains)
	sim						: SimParams = field(default_factory=SimParams)
	robots					: list[RobotState] = field(default_factory=list)
	obstacles				: list[ObstacleState] = field(default_factory=list)
	failures				: list[FailureEvent] = field(default_factory=list)
	controller				: Controller = Controller.DYNAMIC
	execution				: Execution = Execution.CENTRALIZED
	co_head_rule			: bool = True
	fixed_order				: list[int] | None = None
	vs_collision_avoidance	: bool = True
	slice_faults			: list[FailureEvent] = field(default_factory=list)

	def __post_init__(self):
		self.controller = Controller(self.controller)
		self.execution = Execution(self.execution)

	@property
	def labels(self) -> list[int]:
		return sorted(robot.label for robot in self.robots)

	@property
	def resolved_order(self) -> list[int]:
		''' the fixed chain, label order unless given '''
		return list(self.fixed_order) if self.fixed_order is not None else self.labels

	def validate(self) -> 'Scenario':
		''' raises ScenarioError naming the first violated invariant '''
		labels = [robot.label for robot in self.robots]
		if len(labels) == 0:
			raise ScenarioError('a scenario needs at least one robot')
		if len(set(labels)) != len(labels):
			raise ScenarioError(f'robot labels must be unique, got {labels}')
		if sorted(labels) != list(range(1, len(labels) + 1)):
			raise ScenarioError(f'robot labels must be contiguous from 1, got {sorted(labels)}')

		for robot in self.robots:
			if not Vec2.parse(robot.p).is_finite():
				raise ScenarioError(f'robot {robot.label}: position must be finite')
			if not robot.delta_safety > 0:
				raise ScenarioError(f'robot {robot.label}: delta_safety must be positive')
			if self.sim.model == PlantModel.UNICYCLE and not (robot.wheelbase > 0 and robot.offset_d > 0):
				raise ScenarioError(f'robot {robot.label}: wheelbase and offset_d must be positive')
		for k, obstacle in enumerate(self.obstacles):
			if not obstacle.nu_safety > 0:
				raise ScenarioError(f'obstacle {k + 1}: nu_safety must be positive')
			if not (Vec2.parse(obstacle.q).is_finite() and Vec2.parse(obstacle.u).is_finite()):
				raise ScenarioError(f'obstacle {k + 1}: position and velocity must be finite')

		radii = sorted(robot.delta_safety for robot in self.robots)
		if len(radii) > 1 and not self.march.rho > radii[-1] + radii[-2]:
			raise ScenarioError(
				f'rho must exceed combined safety radii: rho={self.march.rho}, '
				f'largest pair {radii[-1] + radii[-2]}')

		for event in self.failures + self.slice_faults:
			if event.robot not in labels:
				raise ScenarioError(f'failure event names unknown robot {event.robot}')
		if self.controller == Controller.FIXED_CHAIN:
			check_fixed_order(self.resolved_order, labels)
		if self.execution == Execution.RING and self.controller != Controller.DYNAMIC:
			raise ScenarioError('ring execution only runs the dynamic controller')
		return self

	def initial_state(self) -> SwarmState:
		return SwarmState(
			t = 0.0,
			robots = [replace(robot, p=Vec2.parse(robot.p), v=Vec2.parse(robot.v), failed=False)
					  for robot in sorted(self.robots, key=lambda robot: robot.label)],
			obstacles = [replace(o, q=Vec2.parse(o.q), u=Vec2.parse(o.u)) for o in self.obstacles],
		)

	def to_dict(self) -> dict[str, Any]:
		return _dump(self)

	@classmethod
	def from_dict(cls, data: dict[str, Any]) -> 'Scenario':
		return _build(cls, data, 'scenario')

	def with_overrides(self, overrides: dict[str, str]) -> 'Scenario':
		''' apply `section.field=value` (or top level `field=value`) strings,
			cast with the declared field type '''
		scenario = self
		for key, value in overrides.items():
			section, _, name = key.rpartition('.')
			if not section:
				scenario = replace(scenario, **{name: _cast_field(Scenario, name, value, key)})
				continue
			if section not in ('march', 'gains', 'sim'):
				raise ScenarioError(f'{key} does not exist in Scenario, only march/gains/sim fields can be set')
			target = getattr(scenario, section)
			casted = _cast_field(type(target), name, value, key)
			scenario = replace(scenario, **{section: replace(target, **{name: casted})})
		return scenario

	def with_seed(self, seed: int | None) -> 'Scenario':
		return self if seed is None else replace(self, sim=replace(self.sim, rng_seed=seed))


def _init_fields(cls) -> dict[str, Any]:
	hints = get_type_hints(cls)
	return {f.name: hints[f.name] for f in fields(cls) if f.init}


def _optional(tp):
	''' `X | None` -> X, anything else unchanged '''
	if get_origin(tp) in (Union, UnionType):
		args = [arg for arg in get_args(tp) if arg is not NoneType]
		if len(args) == 1: return args[0]
	return tp


def _cast(tp, value, where: str):
	if value is None:
		return None
	tp = _optional(tp)
	origin = get_origin(tp)

	if tp is Vec2:
		return Vec2.parse(value)
	if origin is list:
		(item,) = get_args(tp)
		if not isinstance(value, list):
			raise ScenarioParseError(f'{where}: expected a list, got {value!r}')
		return [_cast(item, v, f'{where}[{k}]') for k, v in enumerate(value)]
	if is_dataclass(tp):
		return _build(tp, value, where)
	if isinstance(tp, type) and issubclass(tp, Enum):
		return tp(value)
	if tp is bool:
		if isinstance(value, str): return value.strip().lower() in ('1', 'true', 'yes', 'on')
		return bool(value)
	if tp is int and isinstance(value, float) and not value.is_integer():
		raise ScenarioParseError(f'{where}: expected an integer, got {value!r}')
	return tp(value)


def _cast_field(cls, name: str, value: str, key: str):
	''' mirrors the experiment cli: the dataclass field types decide how to read a string '''
	field_types = _init_fields(cls)
	if name not in field_types:
		raise ScenarioError(f'{key} does not exist in {cls.__name__}')
	if isinstance(value, str) and value.strip().lower() in ('none', 'null'):
		return None
	tp = _optional(field_types[name])
	if get_origin(tp) is list and isinstance(value, str):
		value = json.loads(value)
	try:
		return _cast(tp, value, key)
	except (TypeError, ValueError) as e:
		raise ScenarioError(f'{key}: cannot use {value!r} ({e})') from e


def _build(cls, data, where: str):
	if not isinstance(data, dict):
		raise ScenarioParseError(f'{where}: expected an object, got {data!r}')
	field_types = _init_fields(cls)
	unknown = set(data) - set(field_types)
	if unknown:
		raise ScenarioParseError(f'{where}: unknown fields {sorted(unknown)}')
	try:
		kwargs = {name: _cast(field_types[name], value, f'{where}.{name}') for name, value in data.items()}
		return cls(**kwargs)
	except ScenarioError:
		raise
	except (TypeError, ValueError) as e:
		raise ScenarioParseError(f'{where}: {e}') from e


def _dump(value):
	if isinstance(value, Enum):
		return value.value
	if isinstance(value, Vec2):
		return [value.x, value.y]
	if is_dataclass(value):
		return {f.name: _dump(getattr(value, f.name)) for f in fields(value) if f.init}
	if isinstance(value, (list, tuple)):
		return [_dump(v) for v in value]
	if isinstance(value, float) and not math.isfinite(value):
		raise ScenarioError(f'cannot serialise non-finite value {value}')
	return value


def load_scenario(path_or_name: str | Path) -> Scenario:
	''' a built-in name (see `linemarch list-scenarios`) or a json file '''
	from .library import BUILTIN

	if str(path_or_name) in BUILTIN:
		return BUILTIN[str(path_or_name)]().validate()

	path = Path(path_or_name)
	if not path.is_file():
		raise ScenarioError(f'{path_or_name} is neither a built-in scenario nor a file')
	try:
		with open(path) as f:
			data = json.load(f)
	except json.JSONDecodeError as e:
		raise ScenarioParseError(f'{path}: not a json document ({e})') from e

	if isinstance(data, dict):
		data.setdefault('name', path.stem)
	return Scenario.from_dict(data).validate()


def dump_scenario(scenario: Scenario, path: str | Path) -> Path:
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	with open(path, 'w') as f:
		json.dump(scenario.to_dict(), f, indent='\t')
	return path
