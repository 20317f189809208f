"""Exact convex-polytope valuations and seeded checks of their classification."""

from .errors import ValuationLabError
from .linalg import LinearMap, mpq, rational
from .geometry import (
    Halfspace,
    Polytope,
    Simplex,
    apply_linear_map,
    box,
    contains_origin_interior,
    convex_hull,
    cross_polytope,
    cube,
    facet_enumeration,
    hyperplane_section,
    intersect,
    polar,
    polytope_equal,
    scale,
    split_by_slab,
    triangulate_fan,
    union_if_convex,
    vertices_from_halfspaces,
)
from .functionals import (
    CHI,
    MOMENT,
    MOMENT_MATRIX,
    NAMED,
    POLAR_MOMENT,
    POLAR_MOMENT_MATRIX,
    POLAR_VOLUME,
    ROT_POLAR_MOMENT,
    VOLUME,
    ValuationHandle,
    basis_valuation_scalar,
    basis_valuation_vector_2d,
    decompose_even_odd,
    euler_characteristic,
    linear_combination,
    moment_matrix,
    moment_vector,
    polar_composite,
    rotate_quarter,
    volume,
)
from .pyramids import DoublePyramidParams, is_double_pyramid, make_double_pyramid
from .harness import (
    CheckReport,
    EquivarianceMode,
    TrialBudget,
    check_equivariance,
    check_homogeneity,
    check_valuation_identity,
    gen_pyramid_cap_pair,
    random_polytope,
    random_unimodular,
    replay,
)
from .classification import FitResult

__version__ = "0.1.0"
