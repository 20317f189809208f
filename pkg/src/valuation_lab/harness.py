"""Seeded, exactly-checked trials for the valuation identity and equivariance laws.

Each trial draws from its own ``random.Random`` seeded by ``(seed, trial)``, so
a report depends only on the budget and never on evaluation order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from . import linalg as la
from .errors import (
    DimensionMismatch,
    GeneratorExhausted,
    InvalidConfiguration,
    NonConvexUnion,
    EmptyOrDegenerateIntersection,
    UnsupportedExponent,
    DegenerateInput,
)
from .functionals import MATRIX, VECTOR, ValuationHandle, value_add, value_scale
from .geometry import (
    Polytope,
    apply_linear_map,
    box,
    contains_origin_interior,
    convex_hull,
    intersect,
    scale,
    split_by_slab,
    union_if_convex,
)
from .linalg import LinearMap, mpq
from .pyramids import DoublePyramidParams, is_double_pyramid, make_double_pyramid

MAX_RETRIES = 100


@dataclass(frozen=True)
class TrialBudget:
    trials: int = 100
    dimension: int = 2
    coefficient_bound: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.trials < 1 or self.dimension < 1 or self.coefficient_bound < 1:
            raise ValueError("trials, dimension and coefficient_bound must be positive")


@dataclass
class CheckReport:
    passed: bool
    trials: int
    seed: int
    counterexample: dict | None = field(default=None)

    def __bool__(self):
        return self.passed


class EquivarianceMode(str, Enum):
    INVARIANT = "invariant"
    SL_COVARIANT = "sl_covariant"
    SL_CONTRAVARIANT = "sl_contravariant"
    VL_COVARIANT = "vl_covariant"
    VL_SIGNUM_COVARIANT = "vl_signum_covariant"
    GL_COVARIANT = "gl_covariant"
    GL_CONTRAVARIANT = "gl_contravariant"


_MODE_KIND = {
    EquivarianceMode.SL_COVARIANT: VECTOR,
    EquivarianceMode.SL_CONTRAVARIANT: VECTOR,
    EquivarianceMode.VL_COVARIANT: VECTOR,
    EquivarianceMode.VL_SIGNUM_COVARIANT: VECTOR,
    EquivarianceMode.GL_COVARIANT: MATRIX,
    EquivarianceMode.GL_CONTRAVARIANT: MATRIX,
}


def trial_rng(seed: int, trial: int, salt: str = "") -> random.Random:
    return random.Random(f"valuation-lab:{salt}:{seed}:{trial}")


def random_rational(rng: random.Random, bound: int, positive: bool = False) -> mpq:
    q = rng.randint(1, bound)
    if positive:
        return mpq(rng.randint(1, bound * q), q)
    return mpq(rng.randint(-bound * q, bound * q), q)


# -- linear maps --------------------------------------------------------------

def _signed_permutation(rng: random.Random, n: int, sign: int) -> LinearMap:
    perm = list(range(n))
    rng.shuffle(perm)
    signs = [rng.choice((1, -1)) for _ in range(n)]
    m = [[0] * n for _ in range(n)]
    for i, j in enumerate(perm):
        m[i][j] = signs[i]
    phi = LinearMap(m)
    if phi.det != sign:
        m[0][perm[0]] = -m[0][perm[0]]
        phi = LinearMap(m)
    return phi


def unimodular_from_rng(rng: random.Random, n: int, det_sign: int = 1) -> LinearMap:
    """Product of at most 6 elementary shears / signed permutations with ``det = det_sign``."""
    if det_sign == 0:
        det_sign = rng.choice((1, -1))
    if det_sign not in (1, -1):
        raise ValueError("det_sign must be +1, -1 or 0 (either)")
    phi = LinearMap.identity(n)
    if n == 1:
        return LinearMap([[det_sign]])
    factors = rng.randint(1, 6)
    for k in range(factors):
        last = k == factors - 1
        if last or rng.random() < 0.25:
            f = _signed_permutation(rng, n, det_sign if last else 1)
        else:
            i, j = rng.sample(range(n), 2)
            m = [[int(r == c) for c in range(n)] for r in range(n)]
            m[i][j] = rng.choice((-2, -1, 1, 2))
            f = LinearMap(m)
        phi = f @ phi
    assert phi.det == det_sign
    return phi


def random_unimodular(budget: TrialBudget, det_sign: int = 1, trial: int = 0) -> LinearMap:
    """Seeded unimodular map; ``det_sign`` is +1, -1, or 0 for either sign."""
    return unimodular_from_rng(trial_rng(budget.seed, trial, "map"), budget.dimension, det_sign)


_GL_DIAGONAL = sorted({mpq(p, q) for q in (1, 2, 3) for p in range(1, 3 * q + 1) if mpq(p, q) >= mpq(1, 3)})


def random_gl(rng: random.Random, n: int) -> LinearMap:
    """Unimodular times a diagonal with entries in [1/3, 3]."""
    u = unimodular_from_rng(rng, n, 0)
    return u @ LinearMap.diagonal([rng.choice(_GL_DIAGONAL) for _ in range(n)])


def _map_for_mode(rng: random.Random, n: int, mode: EquivarianceMode) -> LinearMap:
    if mode in (EquivarianceMode.INVARIANT, EquivarianceMode.SL_COVARIANT, EquivarianceMode.SL_CONTRAVARIANT):
        return unimodular_from_rng(rng, n, 1)
    if mode in (EquivarianceMode.VL_COVARIANT, EquivarianceMode.VL_SIGNUM_COVARIANT):
        return unimodular_from_rng(rng, n, 0)
    return random_gl(rng, n)


# -- polytopes ----------------------------------------------------------------

def _random_hull(rng: random.Random, n: int, bound: int) -> Polytope:
    for _ in range(MAX_RETRIES):
        k = rng.randint(2 * n, 3 * n)
        pts = [tuple(random_rational(rng, bound) for _ in range(n)) for _ in range(k)]
        try:
            P = convex_hull(pts)
        except DegenerateInput:
            continue
        if contains_origin_interior(P):
            return P
    raise GeneratorExhausted(f"no origin-interior hull after {MAX_RETRIES} attempts")


def _random_structured(rng: random.Random, n: int, bound: int) -> Polytope:
    pos = lambda: random_rational(rng, bound, positive=True)  # noqa: E731
    family = rng.randrange(3) if n >= 2 else 0
    if family == 0:
        return box([-pos() for _ in range(n)], [pos() for _ in range(n)])
    if family == 1:
        pts = []
        for i in range(n):
            for s in (pos(), -pos()):
                pts.append(tuple(s if j == i else mpq(0) for j in range(n)))
        return convex_hull(pts)
    base = _random_structured(rng, n - 1, bound) if n > 2 else convex_hull([(-pos(),), (pos(),)])
    x = tuple(random_rational(rng, 1) for _ in range(n - 1))
    y = tuple(random_rational(rng, 1) for _ in range(n - 1))
    return make_double_pyramid(DoublePyramidParams(base, pos(), pos(), x, y))


def random_polytope(rng: random.Random, n: int, bound: int, structured: bool = False) -> Polytope:
    """Origin-interior polytope: a random hull, or a box / cross-polytope / double pyramid."""
    if structured:
        return _random_structured(rng, n, bound)
    return _random_hull(rng, n, bound)


def trial_polytope(budget: TrialBudget, trial: int, rng: random.Random | None = None) -> Polytope:
    # Structured families make up one trial in five.
    rng = rng or trial_rng(budget.seed, trial, "polytope")
    return random_polytope(rng, budget.dimension, budget.coefficient_bound, structured=trial % 5 == 4)


def random_slab_split(rng: random.Random, P: Polytope) -> tuple[Polytope, Polytope]:
    n = P.dim
    while True:
        d = tuple(mpq(rng.randint(-2, 2)) for _ in range(n))
        if any(d):
            break
    values = [la.dot(d, v) for v in P.vertices]
    lo = min(values) * mpq(rng.randint(1, 7), 8)
    hi = max(values) * mpq(rng.randint(1, 7), 8)
    return split_by_slab(P, d, lo, hi)


# -- checks -------------------------------------------------------------------

def _valuation_trial(mu: ValuationHandle, budget: TrialBudget, t: int):
    rng = trial_rng(budget.seed, t, "valuation")
    P = trial_polytope(budget, t, rng)
    K, L = random_slab_split(rng, P)
    inter = intersect(K, L)
    lhs = value_add(mu(P), mu(inter))
    rhs = value_add(mu(K), mu(L))
    if lhs != rhs:
        return {"check": "valuation", "trial": t, "K": K, "L": L, "union": P, "intersection": inter, "lhs": lhs, "rhs": rhs}
    return None


def run_trials(budget: TrialBudget, one_trial: Callable[[int], dict | None]) -> CheckReport:
    # First failing trial by index wins, so serial and parallel runs agree.
    for t in range(budget.trials):
        ce = one_trial(t)
        if ce is not None:
            return CheckReport(False, budget.trials, budget.seed, ce)
    return CheckReport(True, budget.trials, budget.seed, None)


def check_valuation_identity(mu: ValuationHandle, budget: TrialBudget) -> CheckReport:
    """``mu(K u L) + mu(K n L) == mu(K) + mu(L)`` on random slab splits."""
    return run_trials(budget, lambda t: _valuation_trial(mu, budget, t))


def transform_law(mode: EquivarianceMode, phi: LinearMap, value):
    """Right-hand side of the law for ``mu(phi P)`` given ``value = mu(P)``."""
    mode = EquivarianceMode(mode)
    if mode is EquivarianceMode.INVARIANT:
        return value
    if mode in (EquivarianceMode.SL_COVARIANT, EquivarianceMode.VL_COVARIANT):
        return phi(value)
    if mode is EquivarianceMode.SL_CONTRAVARIANT:
        return phi.transpose_inverse()(value)
    if mode is EquivarianceMode.VL_SIGNUM_COVARIANT:
        return la.vscale(phi.det, phi(value))
    if mode is EquivarianceMode.GL_COVARIANT:
        return la.mscale(abs(phi.det), phi.conjugate(value))
    return la.mscale(1 / abs(phi.det), phi.transpose_inverse().conjugate(value))


def _equivariance_trial(mu, mode, budget, t):
    rng = trial_rng(budget.seed, t, "equivariance")
    P = trial_polytope(budget, t, rng)
    phi = _map_for_mode(rng, budget.dimension, mode)
    lhs = mu(apply_linear_map(phi, P))
    rhs = transform_law(mode, phi, mu(P))
    if lhs != rhs:
        return {"check": "equivariance", "mode": mode.value, "trial": t, "polytope": P, "map": phi, "lhs": lhs, "rhs": rhs}
    return None


def check_equivariance(mu: ValuationHandle, mode, budget: TrialBudget) -> CheckReport:
    mode = EquivarianceMode(mode)
    want = _MODE_KIND.get(mode)
    if want is not None and mu.kind != want:
        raise DimensionMismatch(f"mode {mode.value} needs a {want} valuation, got {mu.kind}")
    return run_trials(budget, lambda t: _equivariance_trial(mu, mode, budget, t))


def _homogeneity_trial(mu, q, budget, t):
    rng = trial_rng(budget.seed, t, "homogeneity")
    P = trial_polytope(budget, t, rng)
    r = random_rational(rng, budget.coefficient_bound, positive=True)
    lhs = mu(scale(r, P))
    rhs = value_scale(r ** q, mu(P))
    if lhs != rhs:
        return {"check": "homogeneity", "q": q, "trial": t, "polytope": P, "r": r, "lhs": lhs, "rhs": rhs}
    return None


def check_homogeneity(mu: ValuationHandle, q, budget: TrialBudget) -> CheckReport:
    """``mu(rP) == r^q mu(P)`` for random rational ``r > 0`` (integer ``q`` only)."""
    q = la.rational(q) if not isinstance(q, int) else mpq(q)
    if q.denominator != 1:
        raise UnsupportedExponent("only integer homogeneity degrees are supported")
    q = int(q)
    return run_trials(budget, lambda t: _homogeneity_trial(mu, q, budget, t))


def replay(mu: ValuationHandle, counterexample: dict) -> bool:
    """Re-evaluate a stored counterexample; True iff it is still a violation."""
    kind = counterexample["check"]
    if kind == "valuation":
        c = counterexample
        return value_add(mu(c["union"]), mu(c["intersection"])) != value_add(mu(c["K"]), mu(c["L"]))
    if kind == "equivariance":
        c = counterexample
        phi, P = c["map"], c["polytope"]
        return mu(apply_linear_map(phi, P)) != transform_law(c["mode"], phi, mu(P))
    if kind == "homogeneity":
        c = counterexample
        return mu(scale(c["r"], c["polytope"])) != value_scale(c["r"] ** c["q"], mu(c["polytope"]))
    raise ValueError(f"cannot replay a {kind!r} counterexample")


# -- pyramid caps -------------------------------------------------------------

def gen_pyramid_cap_pair(base: Polytope, c, d, s, t, x, y) -> tuple[Polytope, Polytope]:
    """Two double pyramids whose union and intersection are again double pyramids.

    ``K = [B, -c(x,1), t(y,1)]`` and ``L = [B, -s(y,1), d(y,1)]``; their union
    is ``[B, -c(x,1), d(y,1)]`` and their intersection ``[B, -s(y,1), t(y,1)]``.
    Both facts are verified with the kernel before returning.
    """
    c, d, s, t = map(la.rational, (c, d, s, t))
    if not (0 < t <= d and 0 < s <= c):
        raise InvalidConfiguration("need 0 < t <= d and 0 < s <= c")
    K_p = DoublePyramidParams(base, c, t, x, y)
    L_p = DoublePyramidParams(base, s, d, y, y)
    U_p = DoublePyramidParams(base, c, d, x, y)
    I_p = DoublePyramidParams(base, s, t, y, y)
    for p in (K_p, L_p, U_p, I_p):
        if not is_double_pyramid(p):
            raise InvalidConfiguration("a bracketed body is not a double pyramid")
    K, L = make_double_pyramid(K_p), make_double_pyramid(L_p)
    try:
        union = union_if_convex(K, L)
        inter = intersect(K, L)
    except (NonConvexUnion, EmptyOrDegenerateIntersection) as exc:
        raise InvalidConfiguration(str(exc)) from exc
    if union != make_double_pyramid(U_p) or inter != make_double_pyramid(I_p):
        raise InvalidConfiguration("union/intersection do not match the bracketed forms")
    return K, L
