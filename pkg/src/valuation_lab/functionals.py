"""Concrete valuations on polytopes with the origin in their interior.

Values are exact: a rational (scalar), a tuple of rationals (vector) or a
tuple of row tuples (matrix). Every named functional is also exposed as a
:class:`ValuationHandle` so the checkers can treat them uniformly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from . import linalg as la
from .errors import DimensionMismatch, WrongDimension
from .geometry import Polytope, apply_linear_map, polar
from .linalg import LinearMap, mpq

SCALAR, VECTOR, MATRIX = "scalar", "vector", "matrix"


@dataclass(frozen=True)
class ValuationHandle:
    """A named black-box map from polytopes to values of one kind."""

    name: str
    kind: str
    evaluate: Callable[[Polytope], object]

    def __call__(self, P: Polytope):
        return self.evaluate(P)


# -- value arithmetic shared by all kinds ------------------------------------

def value_add(u, v):
    if not isinstance(u, tuple):
        return u + v
    if u and isinstance(u[0], tuple):
        return la.madd(u, v)
    return la.vadd(u, v)


def value_scale(c, u):
    if not isinstance(u, tuple):
        return c * u
    if u and isinstance(u[0], tuple):
        return la.mscale(c, u)
    return la.vscale(c, u)


def value_sub(u, v):
    return value_add(u, value_scale(mpq(-1), v))


def zero_value(kind: str, n: int):
    if kind == SCALAR:
        return mpq(0)
    if kind == VECTOR:
        return la.zeros(n)
    return tuple(la.zeros(n) for _ in range(n))


# -- simplex integrals ------------------------------------------------------

def simplex_volume(vertices: Sequence[Sequence]) -> mpq:
    v0 = vertices[0]
    n = len(v0)
    return abs(la.det([la.vsub(v, v0) for v in vertices[1:]])) / math.factorial(n)


def simplex_moment(vertices: Sequence[Sequence]):
    """``int_S x dx = vol(S) * (sum of vertices) / (n+1)``."""
    n = len(vertices[0])
    s = la.zeros(n)
    for v in vertices:
        s = la.vadd(s, v)
    return la.vscale(simplex_volume(vertices) / (n + 1), s)


def simplex_second_moment(vertices: Sequence[Sequence]):
    """``int_S x x^t dx = vol/((n+1)(n+2)) * (sum v v^t + (sum v)(sum v)^t)``."""
    n = len(vertices[0])
    s = la.zeros(n)
    acc = tuple(la.zeros(n) for _ in range(n))
    for v in vertices:
        s = la.vadd(s, v)
        acc = la.madd(acc, la.outer(v, v))
    acc = la.madd(acc, la.outer(s, s))
    return la.mscale(simplex_volume(vertices) / ((n + 1) * (n + 2)), acc)


# -- the functionals ----------------------------------------------------------

def euler_characteristic(P: Polytope) -> mpq:
    # Every polytope here is convex and nonempty.
    return mpq(1)


def volume(P: Polytope) -> mpq:
    return sum((simplex_volume(c) for c in P.cells()), mpq(0))


def moment_vector(P: Polytope):
    out = la.zeros(P.dim)
    for c in P.cells():
        out = la.vadd(out, simplex_moment(c))
    return out


def moment_matrix(P: Polytope):
    n = P.dim
    out = tuple(la.zeros(n) for _ in range(n))
    for c in P.cells():
        out = la.madd(out, simplex_second_moment(c))
    return out


def rotate_quarter(v: Sequence):
    """Counter-clockwise rotation of the plane by a right angle."""
    if len(v) != 2:
        raise WrongDimension("rotation by pi/2 is only defined in the plane")
    return (-v[1], v[0])


ROTATE_QUARTER = LinearMap([[0, -1], [1, 0]])

CHI = ValuationHandle("chi", SCALAR, euler_characteristic)
VOLUME = ValuationHandle("V", SCALAR, volume)
MOMENT = ValuationHandle("m", VECTOR, moment_vector)
MOMENT_MATRIX = ValuationHandle("M2", MATRIX, moment_matrix)


def polar_composite(base: ValuationHandle) -> ValuationHandle:
    """``P -> base(P*)``."""
    return ValuationHandle(f"polar-{base.name}", base.kind, lambda P: base(polar(P)))


POLAR_VOLUME = polar_composite(VOLUME)
POLAR_MOMENT = polar_composite(MOMENT)
POLAR_MOMENT_MATRIX = polar_composite(MOMENT_MATRIX)


def _rot_polar_moment(P: Polytope):
    if P.dim != 2:
        raise WrongDimension("rot-polar-m is a planar valuation")
    return rotate_quarter(moment_vector(polar(P)))


ROT_POLAR_MOMENT = ValuationHandle("rot-polar-m", VECTOR, _rot_polar_moment)

NAMED = {
    h.name: h
    for h in (CHI, VOLUME, MOMENT, MOMENT_MATRIX, POLAR_VOLUME, POLAR_MOMENT, POLAR_MOMENT_MATRIX, ROT_POLAR_MOMENT)
}


def linear_combination(terms: Sequence[tuple], name: str | None = None) -> ValuationHandle:
    """Rational-linear combination of handles of one kind: ``[(coef, handle), ...]``."""
    terms = [(la.rational(c), h) for c, h in terms]
    if not terms:
        raise ValueError("empty combination")
    kind = terms[0][1].kind
    if any(h.kind != kind for _, h in terms):
        raise DimensionMismatch("cannot combine handles of different kinds")
    if name is None:
        name = " + ".join(f"{la.fmt(c)}*{h.name}" for c, h in terms)

    def evaluate(P):
        out = zero_value(kind, P.dim)
        for c, h in terms:
            if c:
                out = value_add(out, value_scale(c, h(P)))
        return out

    return ValuationHandle(name, kind, evaluate)


def basis_valuation_scalar(k0, k1, k2) -> ValuationHandle:
    """``k0 chi + k1 V + k2 V(P*)``."""
    return linear_combination([(k0, CHI), (k1, VOLUME), (k2, POLAR_VOLUME)])


def basis_valuation_vector_2d(k1, k2) -> ValuationHandle:
    """``k1 m(P) + k2 rot m(P*)`` in the plane."""
    return linear_combination([(k1, MOMENT), (k2, ROT_POLAR_MOMENT)])


def default_theta(n: int) -> LinearMap:
    return LinearMap.diagonal([-1] + [1] * (n - 1))


def _reflected_term(mu: ValuationHandle, theta: LinearMap, P: Polytope):
    return theta(mu(apply_linear_map(theta.inverse(), P)))


def decompose_even_odd(mu: ValuationHandle, P: Polytope, theta: LinearMap | None = None):
    """Split ``mu(P)`` into its VL(n)-covariant and signum-covariant parts.

    ``theta`` is any map with determinant -1 (default ``diag(-1, 1, ..., 1)``);
    for SL(n)-covariant ``mu`` the result does not depend on it.
    """
    if mu.kind != VECTOR:
        raise DimensionMismatch("even/odd split is defined for vector valuations")
    theta = theta or default_theta(P.dim)
    if theta.det != -1:
        raise ValueError("theta must have determinant -1")
    here = mu(P)
    there = _reflected_term(mu, theta, P)
    half = mpq(1, 2)
    return la.vscale(half, la.vadd(here, there)), la.vscale(half, la.vsub(here, there))


def even_part(mu: ValuationHandle, theta: LinearMap | None = None) -> ValuationHandle:
    return ValuationHandle(f"{mu.name}^+", VECTOR, lambda P: decompose_even_odd(mu, P, theta)[0])


def odd_part(mu: ValuationHandle, theta: LinearMap | None = None) -> ValuationHandle:
    return ValuationHandle(f"{mu.name}^-", VECTOR, lambda P: decompose_even_odd(mu, P, theta)[1])
