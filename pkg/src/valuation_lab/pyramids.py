"""Double pyramids ``[B, -c(x,1), d(y,1)]`` over a base ``B`` in ``e_n^perp``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import linalg as la
from .linalg import mpq
from .errors import InvalidConfiguration
from .geometry import Polytope, contains_origin_interior, convex_hull, hyperplane_section


@dataclass(frozen=True)
class DoublePyramidParams:
    """Base polytope in R^{n-1}, apex heights ``c, d > 0`` and apex offsets ``x, y``.

    For n = 2 the base is the segment ``[-a, b]``; use :meth:`planar`.
    """

    base: Polytope
    c: mpq
    d: mpq
    x: tuple
    y: tuple

    def __post_init__(self):
        object.__setattr__(self, "c", la.rational(self.c))
        object.__setattr__(self, "d", la.rational(self.d))
        object.__setattr__(self, "x", la.vector(self.x))
        object.__setattr__(self, "y", la.vector(self.y))
        if self.c <= 0 or self.d <= 0:
            raise InvalidConfiguration("apex heights c, d must be positive")
        if len(self.x) != self.base.dim or len(self.y) != self.base.dim:
            raise InvalidConfiguration("apex offsets must live in R^{n-1}")
        if not contains_origin_interior(self.base):
            raise InvalidConfiguration("base must contain the origin in its relative interior")

    @classmethod
    def planar(cls, a, b, c, d, x=0, y=0) -> "DoublePyramidParams":
        a, b = la.rational(a), la.rational(b)
        if a <= 0 or b <= 0:
            raise InvalidConfiguration("segment endpoints a, b must be positive")
        base = convex_hull([(-a,), (b,)])
        return cls(base, c, d, (x,), (y,))

    @property
    def n(self) -> int:
        return self.base.dim + 1

    @property
    def a(self) -> mpq:
        return -self.base.vertices[0][0]

    @property
    def b(self) -> mpq:
        return self.base.vertices[-1][0]

    @property
    def straight(self) -> bool:
        return not any(self.x) and not any(self.y)

    def lower_apex(self) -> tuple:
        return tuple(-self.c * t for t in self.x) + (-self.c,)

    def upper_apex(self) -> tuple:
        return tuple(self.d * t for t in self.y) + (self.d,)


def lift(v: Sequence) -> tuple:
    return tuple(v) + (mpq(0),)


def make_double_pyramid(p: DoublePyramidParams) -> Polytope:
    pts = [lift(v) for v in p.base.vertices]
    pts += [p.lower_apex(), p.upper_apex()]
    return convex_hull(pts)


def is_double_pyramid(p: DoublePyramidParams) -> bool:
    """True iff the hull meets ``x_n = 0`` exactly in the base."""
    section = hyperplane_section(make_double_pyramid(p))
    return section is not None and section == p.base
