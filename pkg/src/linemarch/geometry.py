''' Planar vectors. Everything downstream (positions, velocities, marching
	directions) is a `Vec2`, a named tuple so it is immutable, hashable,
	json-serialisable as a list and accepted by `np.asarray` as is.
'''
from __future__ import annotations
from typing import NamedTuple

import math

from .shared import EPS_ZERO


class Vec2(NamedTuple):
	x: float
	y: float

	# tuple's own + and * mean concatenation/repetition, we want arithmetic
	def __add__(self, other: Vec2) -> Vec2:
		return Vec2(self.x + other.x, self.y + other.y)

	def __sub__(self, other: Vec2) -> Vec2:
		return Vec2(self.x - other.x, self.y - other.y)

	def __mul__(self, scalar: float) -> Vec2:
		return Vec2(self.x * scalar, self.y * scalar)

	__rmul__ = __mul__

	def __neg__(self) -> Vec2:
		return Vec2(-self.x, -self.y)

	def __truediv__(self, scalar: float) -> Vec2:
		return Vec2(self.x / scalar, self.y / scalar)

	def norm(self) -> float:
		return math.hypot(self.x, self.y)

	def is_finite(self) -> bool:
		return math.isfinite(self.x) and math.isfinite(self.y)

	@classmethod
	def parse(cls, value) -> Vec2:
		''' accepts `Vec2`, `[x, y]` or the cli form `'x,y'` '''
		if isinstance(value, str):
			value = value.strip('()[] ').split(',')
		x, y = value
		return cls(float(x), float(y))


ZERO = Vec2(0.0, 0.0)


def gamma(x: Vec2) -> Vec2:
	''' unit vector along x, the zero vector when x has no direction '''
	length = math.hypot(x.x, x.y)
	if length < EPS_ZERO:
		return ZERO
	return Vec2(x.x / length, x.y / length)


def rotate(theta: float, x: Vec2) -> Vec2:
	''' R(theta) x, anticlockwise '''
	c, s = math.cos(theta), math.sin(theta)
	return Vec2(c * x.x - s * x.y, s * x.x + c * x.y)


def inner(x: Vec2, y: Vec2) -> float:
	return x.x * y.x + x.y * y.y


def distance(a: Vec2, b: Vec2) -> float:
	return math.hypot(a.x - b.x, a.y - b.y)
