import math

import pytest
import sympy as sp
from hypothesis import given, settings

from valuation_lab import (
    CHI,
    MOMENT,
    POLAR_MOMENT,
    POLAR_VOLUME,
    ROT_POLAR_MOMENT,
    VOLUME,
    apply_linear_map,
    basis_valuation_scalar,
    basis_valuation_vector_2d,
    box,
    convex_hull,
    cross_polytope,
    cube,
    decompose_even_odd,
    euler_characteristic,
    linear_combination,
    moment_matrix,
    moment_vector,
    polar_composite,
    rotate_quarter,
    volume,
)
from valuation_lab import linalg as la
from valuation_lab.errors import DimensionMismatch, WrongDimension
from valuation_lab.functionals import (
    MOMENT_MATRIX,
    NAMED,
    even_part,
    odd_part,
    simplex_moment,
    simplex_second_moment,
    simplex_volume,
    value_add,
    value_scale,
    zero_value,
)
from valuation_lab.linalg import LinearMap, mpq

import oracles
from conftest import origin_polytopes


# -- simplex formulas against iterated integration ------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3])
def test_simplex_formulas_on_standard_simplex(n):
    xs = sp.symbols(f"x0:{n}")
    verts = [tuple(mpq(0) for _ in range(n))] + [tuple(mpq(int(i == j)) for j in range(n)) for i in range(n)]
    assert simplex_volume(verts) == oracles.standard_simplex_integral(sp.Integer(1), xs)
    m = simplex_moment(verts)
    M = simplex_second_moment(verts)
    for i in range(n):
        assert m[i] == oracles.standard_simplex_integral(xs[i], xs)
        for j in range(n):
            assert M[i][j] == oracles.standard_simplex_integral(xs[i] * xs[j], xs)


@pytest.mark.parametrize("lows,highs", [([-1, -1], [1, 1]), ([-1, -2], [3, 1]), ([-1, -1, -1], [2, 1, mpq(1, 2)])])
def test_box_integrals(lows, highs):
    n = len(lows)
    xs = sp.symbols(f"x0:{n}")
    P = box(lows, highs)
    assert volume(P) == oracles.box_integral(lows, highs, sp.Integer(1), xs)
    m, M = moment_vector(P), moment_matrix(P)
    for i in range(n):
        assert m[i] == oracles.box_integral(lows, highs, xs[i], xs)
        for j in range(n):
            assert M[i][j] == oracles.box_integral(lows, highs, xs[i] * xs[j], xs)


@settings(max_examples=15)
@given(origin_polytopes(n=2))
def test_polygon_integrals_against_strip_oracle(P):
    area, m, M = oracles.polygon_moments(P.vertices)
    assert volume(P) == area
    assert moment_vector(P) == m
    assert moment_matrix(P) == tuple(tuple(r) for r in M)


# -- named functionals ------------------------------------------------------------------

@pytest.mark.parametrize("P", [cube(2), cross_polytope(3), convex_hull([(-1, 0), (2, 0), (0, 1), (0, -1)])])
def test_euler_characteristic(P):
    assert euler_characteristic(P) == 1
    assert CHI(P) == 1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_volume_of_cube_and_cross(n):
    assert volume(cube(n)) == 2 ** n
    # oracle: 2^n orthant simplices conv{0, e_1, ..., e_n}, each of volume 1/n!
    assert volume(cross_polytope(n)) == mpq(2 ** n, math.factorial(n))


def test_volume_of_kite(kite):
    assert volume(kite) == oracles.shoelace(kite.vertices) == 3


@pytest.mark.parametrize("P", [cube(2), cross_polytope(2), cube(3), cross_polytope(4)])
def test_moment_of_symmetric_bodies_vanishes(P):
    assert moment_vector(P) == la.zeros(P.dim)


def test_moment_of_kite(kite):
    # oracle: triangle areas times centroids, (1/2, 1/2) + (1/2, -1/2)
    assert moment_vector(kite) == (1, 0)


def test_moment_of_tall_kite():
    P = convex_hull([(1, 0), (-1, 0), (0, -1), (0, 2)])
    # oracle: (0, 4/3) from the upper triangle plus (0, -1/3) from the lower one
    assert moment_vector(P) == (0, 1)


def test_moment_matrix_of_square():
    assert moment_matrix(cube(2)) == la.matrix([[mpq(4, 3), 0], [0, mpq(4, 3)]])


def test_moment_matrix_of_cross():
    xs = sp.symbols("x0:2")
    # oracle: four orthant copies of the standard triangle
    corner = oracles.standard_simplex_integral(xs[0] ** 2, xs)
    assert corner == mpq(1, 12)
    assert moment_matrix(cross_polytope(2)) == la.matrix([[4 * corner, 0], [0, 4 * corner]])


@given(origin_polytopes(n=3, max_points=3))
def test_moment_matrix_is_symmetric_psd(P):
    M = moment_matrix(P)
    assert M == la.transpose(M)
    # Sylvester: leading principal minors of a positive definite Gram integral
    assert M[0][0] > 0
    assert la.det([r[:2] for r in M[:2]]) > 0
    assert la.det(M) > 0


def test_rotate_quarter():
    assert rotate_quarter((1, 0)) == (0, 1)
    assert rotate_quarter((0, 1)) == (-1, 0)
    assert rotate_quarter((mpq(-3, 4), 0)) == (0, mpq(-3, 4))
    with pytest.raises(WrongDimension):
        rotate_quarter((1, 0, 0))


def test_polar_composites(kite):
    assert POLAR_VOLUME(cube(2)) == volume(cross_polytope(2)) == 2
    # oracle: the polar is [-1, 1/2] x [-1, 1], area 3 and centroid (-1/4, 0)
    assert POLAR_MOMENT(kite) == (mpq(-3, 4), 0)
    twice = polar_composite(polar_composite(VOLUME))
    assert twice(kite) == volume(kite)


def test_rot_polar_moment_needs_the_plane():
    with pytest.raises(WrongDimension):
        ROT_POLAR_MOMENT(cube(3))


def test_named_handles():
    assert set(NAMED) == {"chi", "V", "polar-V", "m", "polar-m", "rot-polar-m", "M2", "polar-M2"}
    assert NAMED["M2"] is MOMENT_MATRIX


# -- combinations ------------------------------------------------------------------------

def test_scalar_basis():
    assert basis_valuation_scalar(3, 2, -1)(cross_polytope(2)) == 3 + 2 * 2 - 4
    for P in (cube(2), cross_polytope(3)):
        assert basis_valuation_scalar(1, 0, 0)(P) == 1
    assert basis_valuation_scalar(0, 1, 0)(cube(2)) == 4


def test_vector_basis(kite):
    assert basis_valuation_vector_2d(1, 0)(kite) == (1, 0)
    assert basis_valuation_vector_2d(0, 1)(kite) == (0, mpq(-3, 4))
    for P in (cube(2), cross_polytope(2)):
        assert basis_valuation_vector_2d(5, -7)(P) == (0, 0)


def test_linear_combination_rejects_mixed_kinds():
    with pytest.raises(DimensionMismatch):
        linear_combination([(1, VOLUME), (1, MOMENT)])
    with pytest.raises(ValueError):
        linear_combination([])


def test_value_arithmetic():
    assert value_add(mpq(1), mpq(2)) == 3
    assert value_scale(2, (mpq(1), mpq(-1))) == (2, -2)
    assert value_add(la.identity(2), la.identity(2)) == la.mscale(2, la.identity(2))
    assert zero_value("matrix", 2) == la.mscale(0, la.identity(2))


# -- even/odd decomposition ---------------------------------------------------------------

THETAS = [LinearMap.diagonal([-1, 1]), LinearMap([[0, 1], [1, 0]]), LinearMap([[1, 1], [0, -1]])]


def test_moment_is_all_even(kite):
    plus, minus = decompose_even_odd(MOMENT, kite)
    assert plus == moment_vector(kite)
    assert minus == (0, 0)


def test_rot_polar_moment_is_all_odd(kite):
    plus, minus = decompose_even_odd(ROT_POLAR_MOMENT, kite)
    assert plus == (0, 0)
    assert minus == ROT_POLAR_MOMENT(kite)


def test_split_recovers_summands(kite):
    mu = basis_valuation_vector_2d(1, 1)
    plus, minus = decompose_even_odd(mu, kite)
    assert plus == (1, 0)
    assert minus == (0, mpq(-3, 4))


def test_decomposition_needs_orientation_reversing_theta(kite):
    with pytest.raises(ValueError):
        decompose_even_odd(MOMENT, kite, LinearMap.identity(2))
    with pytest.raises(DimensionMismatch):
        decompose_even_odd(VOLUME, kite)


@given(origin_polytopes(n=2))
def test_decomposition_sums_and_is_theta_independent(P):
    mu = basis_valuation_vector_2d(mpq(2, 3), -5)
    splits = [decompose_even_odd(mu, P, th) for th in THETAS]
    for plus, minus in splits:
        assert la.vadd(plus, minus) == mu(P)
    assert all(s == splits[0] for s in splits)
    assert even_part(mu)(P) == splits[0][0]
    assert odd_part(mu)(P) == splits[0][1]


@given(origin_polytopes(n=2))
def test_even_part_covariant_and_odd_part_signum(P):
    mu = basis_valuation_vector_2d(3, 4)
    theta = THETAS[2]
    image = apply_linear_map(theta, P)
    plus, minus = decompose_even_odd(mu, P)
    plus_t, minus_t = decompose_even_odd(mu, image)
    assert plus_t == theta(plus)
    assert minus_t == la.vscale(theta.det, theta(minus))
