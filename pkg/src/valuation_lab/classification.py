"""Executable versions of the classification results.

Covers the planar double-pyramid formulas, the functional equations they lead
to, the one-dimensional even/odd representations, and exact basis fitting
against ``chi, V, V(P*)``, ``m, rot m(P*)`` and ``M2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import linalg as la
from .errors import FitImpossible, NotEven, NotOdd, ScreeningFailed, SingularMap, SingularTrainingSet, WrongDimension
from .functionals import (
    CHI,
    MATRIX,
    MOMENT,
    MOMENT_MATRIX,
    POLAR_VOLUME,
    ROT_POLAR_MOMENT,
    SCALAR,
    VECTOR,
    VOLUME,
    ValuationHandle,
    moment_vector,
    value_add,
    value_scale,
)
from .geometry import Polytope, box, convex_hull, cross_polytope, cube
from .harness import CheckReport, TrialBudget, run_trials, check_equivariance, random_rational, trial_polytope, trial_rng
from .linalg import mpq
from .pyramids import DoublePyramidParams, is_double_pyramid, make_double_pyramid

__all__ = [
    "DoublePyramidParams",
    "Dim1Segment",
    "ExactLog",
    "FitResult",
    "make_double_pyramid",
    "is_double_pyramid",
    "eval_R2_formula",
    "random_R2_family",
    "verify_R2_against_moment",
    "eval_Q2_formula",
    "pyramid_split_terms",
    "extract_F_from_moment",
    "fit_F_quadratic",
    "verify_Q2_against_moment",
    "check_inhomogeneous_functional_eq",
    "check_homogeneous_solution",
    "check_cauchy_additive",
    "check_multiplicative_cauchy",
    "dim1_even_representation",
    "dim1_odd_representation",
    "fit_dim1_constant",
    "fit_scalar_classification",
    "fit_vector_classification",
    "fit_matrix_classification",
    "default_scalar_train",
    "default_vector_train",
    "random_holdout",
]

HALF = mpq(1, 2)


@dataclass
class FitResult:
    coefficients: list
    residual_ok: bool
    holdout_failures: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# planar double pyramids
# ---------------------------------------------------------------------------

def eval_R2_formula(p: DoublePyramidParams, k) -> tuple:
    """``k (a+b) ((c+d)(b-a, d-c) + (y d^2 - x c^2) e_1)``."""
    if p.n != 2:
        raise WrongDimension("the double pyramid formula is planar")
    k = la.rational(k)
    a, b, c, d = p.a, p.b, p.c, p.d
    x, y = p.x[0], p.y[0]
    first = (c + d) * (b - a) + y * d * d - x * c * c
    second = (c + d) * (d - c)
    return (k * (a + b) * first, k * (a + b) * second)


def _random_R2_params(rng, bound: int, slanted: bool) -> DoublePyramidParams:
    pos = lambda: random_rational(rng, bound, positive=True)  # noqa: E731
    a, b, c, d = pos(), pos(), pos(), pos()
    if not slanted:
        return DoublePyramidParams.planar(a, b, c, d)
    x, y = random_rational(rng, bound), random_rational(rng, bound)
    while True:
        p = DoublePyramidParams.planar(a, b, c, d, x, y)
        if (x or y) and is_double_pyramid(p):
            return p
        if not (x or y):
            x = random_rational(rng, bound) or mpq(1)
        x, y = x / 2, y / 2


def random_R2_family(budget: TrialBudget) -> list[DoublePyramidParams]:
    """Valid planar double pyramids; every other one has slanted apexes."""
    out = []
    for t in range(budget.trials):
        rng = trial_rng(budget.seed, t, "R2")
        out.append(_random_R2_params(rng, budget.coefficient_bound, slanted=t % 2 == 1))
    return out


def _fit_R2_constant(family: Sequence[DoublePyramidParams]) -> mpq:
    for p in family:
        unit = eval_R2_formula(p, 1)
        m = moment_vector(make_double_pyramid(p))
        for i in range(2):
            if unit[i] != 0:
                return m[i] / unit[i]
    raise FitImpossible("formula vanishes on every instance; the constant is undetermined")


ASYMMETRIC_R2 = DoublePyramidParams.planar(1, 2, 1, 1)


def verify_R2_against_moment(budget: TrialBudget, family: Sequence[DoublePyramidParams] | None = None) -> FitResult:
    """Fit ``k`` with ``m = eval_R2_formula(., k)`` and verify it on the whole family.

    A family on which the formula vanishes identically cannot determine ``k``;
    in that case the fit is retried with an asymmetric instance prepended.
    """
    family = list(family) if family is not None else random_R2_family(budget)
    if any(not is_double_pyramid(p) for p in family):
        raise ValueError("family contains parameters that do not form a double pyramid")
    try:
        k = _fit_R2_constant(family)
    except FitImpossible:
        family = [ASYMMETRIC_R2] + family
        k = _fit_R2_constant(family)
    failures = []
    for p in family:
        P = make_double_pyramid(p)
        if moment_vector(P) != eval_R2_formula(p, k):
            failures.append(P)
    return FitResult([k], not failures, failures)


def eval_Q2_formula(a, b, c, d, F: Callable) -> tuple:
    a, b, c, d = map(la.rational, (a, b, c, d))
    Fac, Fbc, Fad, Fbd = F(a * c), F(b * c), F(a * d), F(b * d)
    first = -Fac / c + Fbc / c - Fad / d + Fbd / d
    second = -Fac / a - Fbc / b + Fad / a + Fbd / b
    return (first, second)


def pyramid_split_terms(a, b, c, d, F: Callable) -> tuple[tuple, tuple]:
    """Values on the lower pyramid ``[I, -c e_2]`` and upper pyramid ``[I, d e_2]``."""
    a, b, c, d = map(la.rational, (a, b, c, d))
    lower = ((F(b * c) - F(a * c)) / c, -F(a * c) / a - F(b * c) / b)
    upper = ((F(b * d) - F(a * d)) / d, F(a * d) / a + F(b * d) / b)
    return lower, upper


def extract_F_from_moment(r) -> mpq:
    """Half the first moment of ``conv{(-1,0), (r,0), (0,+-1)}``."""
    r = la.rational(r)
    if r <= 0:
        raise ValueError("r must be positive")
    P = convex_hull([(-1, 0), (r, 0), (0, 1), (0, -1)])
    return HALF * moment_vector(P)[0]


def fit_F_quadratic(F: Callable = extract_F_from_moment, r1=2, r2=3) -> tuple[mpq, mpq]:
    """Solve ``F(r) = k r^2 + kt`` from the two samples ``r1, r2``."""
    r1, r2 = la.rational(r1), la.rational(r2)
    k, kt = la.solve([[r1 * r1, 1], [r2 * r2, 1]], [F(r1), F(r2)])
    return k, kt


def verify_Q2_against_moment(budget: TrialBudget) -> FitResult:
    """Recover ``(k, kt)`` from two samples, then check F and the straight-pyramid formula.

    Failures are the straight double pyramids (or the segment polytopes used
    to sample F) where agreement breaks.
    """
    k, kt = fit_F_quadratic()
    quad = lambda r: k * r * r + kt  # noqa: E731
    failures = []
    for t in range(budget.trials):
        rng = trial_rng(budget.seed, t, "Q2")
        r = random_rational(rng, budget.coefficient_bound, positive=True)
        if extract_F_from_moment(r) != quad(r):
            failures.append(convex_hull([(-1, 0), (r, 0), (0, 1), (0, -1)]))
        p = _random_R2_params(rng, budget.coefficient_bound, slanted=False)
        P = make_double_pyramid(p)
        if moment_vector(P) != eval_Q2_formula(p.a, p.b, p.c, p.d, quad):
            failures.append(P)
    return FitResult([k, kt], not failures, failures)


# ---------------------------------------------------------------------------
# functional equations
# ---------------------------------------------------------------------------

def check_inhomogeneous_functional_eq(k, kt, budget: TrialBudget, F: Callable | None = None) -> CheckReport:
    """``F(s) = F(s/(1+t)) + (2+t)/t F(st/(1+t)) - (2+t)/t kt`` for random ``s, t > 0``.

    ``F`` defaults to the claimed general solution ``k r^2 + kt``.
    """
    k, kt = la.rational(k), la.rational(kt)
    if F is None:
        F = lambda r: k * r * r + kt  # noqa: E731

    def trial(i):
        rng = trial_rng(budget.seed, i, "inhomogeneous")
        s = random_rational(rng, budget.coefficient_bound, positive=True)
        t = random_rational(rng, budget.coefficient_bound, positive=True)
        w = (2 + t) / t
        lhs = F(s)
        rhs = F(s / (1 + t)) + w * F(s * t / (1 + t)) - w * kt
        if lhs != rhs:
            return {"check": "functional_eq", "trial": i, "s": s, "t": t, "lhs": lhs, "rhs": rhs}
        return None

    return run_trials(budget, trial)


def check_homogeneous_solution(budget: TrialBudget, G: Callable | None = None) -> CheckReport:
    """``G(u+v) = G(v) + (2v+u)/u G(u)`` and the variant with ``u, v`` swapped."""
    if G is None:
        G = lambda u: u * u  # noqa: E731

    def trial(i):
        rng = trial_rng(budget.seed, i, "homogeneous")
        u = random_rational(rng, budget.coefficient_bound, positive=True)
        v = random_rational(rng, budget.coefficient_bound, positive=True)
        lhs = G(u + v)
        for rhs in (G(v) + (2 * v + u) / u * G(u), G(u) + (2 * u + v) / v * G(v)):
            if lhs != rhs:
                return {"check": "homogeneous_solution", "trial": i, "u": u, "v": v, "lhs": lhs, "rhs": rhs}
        return None

    return run_trials(budget, trial)


def check_cauchy_additive(f: Callable, domain_dim: int, budget: TrialBudget):
    """Test ``f(s+t) = f(s) + f(t)``; on success fit and verify the linear form.

    Returns ``(report, coefficients)`` where coefficients is None on failure.
    """
    bound = budget.coefficient_bound

    def rand_vec(rng):
        return tuple(random_rational(rng, bound) for _ in range(domain_dim))

    def additivity(i):
        rng = trial_rng(budget.seed, i, "cauchy")
        s, t = rand_vec(rng), rand_vec(rng)
        lhs, rhs = f(la.vadd(s, t)), f(s) + f(t)
        if lhs != rhs:
            return {"check": "cauchy", "trial": i, "s": s, "t": t, "lhs": lhs, "rhs": rhs}
        return None

    report = run_trials(budget, additivity)
    if not report.passed:
        return report, None
    coeffs = [f(e) for e in la.identity(domain_dim)]

    def linearity(i):
        rng = trial_rng(budget.seed, i, "cauchy-holdout")
        x = rand_vec(rng)
        lhs, rhs = f(x), sum((c * xi for c, xi in zip(coeffs, x)), mpq(0))
        if lhs != rhs:
            return {"check": "cauchy_linear", "trial": i, "x": x, "lhs": lhs, "rhs": rhs}
        return None

    report = run_trials(budget, linearity)
    return report, (coeffs if report.passed else None)


def check_multiplicative_cauchy(F: Callable, budget: TrialBudget) -> CheckReport:
    """``F(st) = F(s) + F(t)`` for random positive rationals."""

    def trial(i):
        rng = trial_rng(budget.seed, i, "multiplicative")
        s = random_rational(rng, budget.coefficient_bound, positive=True)
        t = random_rational(rng, budget.coefficient_bound, positive=True)
        lhs, rhs = F(s * t), F(s) + F(t)
        if lhs != rhs:
            return {"check": "multiplicative_cauchy", "trial": i, "s": s, "t": t, "lhs": lhs, "rhs": rhs}
        return None

    return run_trials(budget, trial)


class ExactLog:
    """Rational-linear combination of logarithms of primes.

    ``ExactLog.of(r)`` is ``ln r`` held exactly through the prime factorisation
    of the positive rational ``r``; logs of distinct primes are linearly
    independent over the rationals, so equality of these objects is equality
    of the real numbers they denote.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {p: mpq(c) for p, c in (terms or {}).items() if c != 0}

    @classmethod
    def of(cls, r) -> "ExactLog":
        r = la.rational(r)
        if r <= 0:
            raise ValueError("logarithm of a non-positive number")
        terms: dict[int, mpq] = {}
        for value, sign in ((int(r.numerator), 1), (int(r.denominator), -1)):
            for p, e in _factorize(value).items():
                terms[p] = terms.get(p, mpq(0)) + sign * e
        return cls(terms)

    def __add__(self, other):
        if not isinstance(other, ExactLog):
            if other == 0:
                return self
            return NotImplemented
        out = dict(self.terms)
        for p, c in other.terms.items():
            out[p] = out.get(p, mpq(0)) + c
        return ExactLog(out)

    __radd__ = __add__

    def __neg__(self):
        return ExactLog({p: -c for p, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        c = la.rational(c)
        return ExactLog({p: c * v for p, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, ExactLog):
            return self.terms == other.terms
        return other == 0 and not self.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{la.fmt(c)}*ln({p})" for p, c in sorted(self.terms.items()))


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# ---------------------------------------------------------------------------
# one-dimensional valuations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Dim1Segment:
    """The segment ``[-a, b]`` with ``a, b > 0``."""

    a: mpq
    b: mpq

    def __post_init__(self):
        object.__setattr__(self, "a", la.rational(self.a))
        object.__setattr__(self, "b", la.rational(self.b))
        if self.a <= 0 or self.b <= 0:
            raise ValueError("segment must contain the origin in its interior")

    def reflected(self) -> "Dim1Segment":
        return Dim1Segment(self.b, self.a)

    def scaled(self, r) -> "Dim1Segment":
        return Dim1Segment(self.a * r, self.b * r)


def _segment_pairs(budget: TrialBudget, salt: str):
    for i in range(budget.trials):
        rng = trial_rng(budget.seed, i, salt)
        yield i, (random_rational(rng, budget.coefficient_bound, positive=True),
                  random_rational(rng, budget.coefficient_bound, positive=True))


def _pow(r, q: int):
    return r ** q


def fit_dim1_constant(mu: Callable, q: int, parity: str) -> mpq:
    """Constant in ``const (a^q + b^q)`` (even) or ``const (b^q - a^q)`` (odd, q != 0)."""
    if parity == "even":
        return mu(Dim1Segment(1, 1)) / 2
    if q == 0:
        raise ValueError("the 0-homogeneous odd case has no power-law constant")
    return mu(Dim1Segment(1, 2)) / (_pow(mpq(2), q) - 1)


def dim1_even_representation(mu: Callable, budget: TrialBudget, q: int | None = None) -> CheckReport:
    """``mu[-a, b] = mu[-a, a]/2 + mu[-b, b]/2``; with ``q`` also ``const (a^q + b^q)``.

    Raises NotEven when ``mu[-a, b] != mu[-b, a]`` on a sampled segment.
    """
    for i, (a, b) in _segment_pairs(budget, "dim1-parity"):
        I = Dim1Segment(a, b)
        if mu(I) != mu(I.reflected()):
            raise NotEven(f"mu[-{la.fmt(a)}, {la.fmt(b)}] != mu[-{la.fmt(b)}, {la.fmt(a)}]")
    const = fit_dim1_constant(mu, q, "even") if q is not None else None

    def trial(i):
        rng = trial_rng(budget.seed, i, "dim1-even")
        a = random_rational(rng, budget.coefficient_bound, positive=True)
        b = random_rational(rng, budget.coefficient_bound, positive=True)
        lhs = mu(Dim1Segment(a, b))
        checks = [HALF * mu(Dim1Segment(a, a)) + HALF * mu(Dim1Segment(b, b))]
        if const is not None:
            checks.append(const * (_pow(a, q) + _pow(b, q)))
        for rhs in checks:
            if lhs != rhs:
                return {"check": "dim1_even", "trial": i, "a": a, "b": b, "lhs": lhs, "rhs": rhs}
        return None

    return run_trials(budget, trial)


def dim1_odd_representation(mu: Callable, budget: TrialBudget, q: int | None = None) -> CheckReport:
    """``mu[-a, b] = mu[-1, b] - mu[-1, a]``, plus the homogeneous closed form for ``q``.

    For ``q != 0`` the form is ``const (b^q - a^q)``. For ``q = 0`` the
    logarithmic form is checked through ``F(r) = mu[-1, r]``: 0-homogeneity of
    ``mu`` and ``F(st) = F(s) + F(t)``. Raises NotOdd on a parity violation.
    """
    for i, (a, b) in _segment_pairs(budget, "dim1-parity"):
        I = Dim1Segment(a, b)
        if mu(I.reflected()) != -mu(I):
            raise NotOdd(f"mu[-{la.fmt(b)}, {la.fmt(a)}] != -mu[-{la.fmt(a)}, {la.fmt(b)}]")
    F = lambda r: mu(Dim1Segment(1, r))  # noqa: E731
    const = fit_dim1_constant(mu, q, "odd") if q not in (None, 0) else None

    def trial(i):
        rng = trial_rng(budget.seed, i, "dim1-odd")
        a = random_rational(rng, budget.coefficient_bound, positive=True)
        b = random_rational(rng, budget.coefficient_bound, positive=True)
        I = Dim1Segment(a, b)
        lhs = mu(I)
        checks = [F(b) - F(a)]
        if const is not None:
            checks.append(const * (_pow(b, q) - _pow(a, q)))
        if q == 0:
            r = random_rational(rng, budget.coefficient_bound, positive=True)
            checks.append(mu(I.scaled(r)))
        for rhs in checks:
            if lhs != rhs:
                return {"check": "dim1_odd", "trial": i, "a": a, "b": b, "lhs": lhs, "rhs": rhs}
        return None

    report = run_trials(budget, trial)
    if report.passed and q == 0:
        report = check_multiplicative_cauchy(F, budget)
    return report


# ---------------------------------------------------------------------------
# basis fitting
# ---------------------------------------------------------------------------

def _flatten(value) -> tuple:
    if not isinstance(value, tuple):
        return (value,)
    if value and isinstance(value[0], tuple):
        return tuple(x for row in value for x in row)
    return value


def _fit(mu: ValuationHandle, basis: Sequence[ValuationHandle], train, holdout, extra_check=None) -> FitResult:
    columns = [[] for _ in basis]
    target = []
    for P in train:
        target.extend(_flatten(mu(P)))
        for j, h in enumerate(basis):
            columns[j].extend(_flatten(h(P)))
    try:
        coeffs = list(la.least_squares(columns, target))
    except SingularMap as exc:
        raise SingularTrainingSet("training polytopes do not separate the basis") from exc
    failures = []
    for P in list(train) + list(holdout):
        got = mu(P)
        want = None
        for c, h in zip(coeffs, basis):
            term = value_scale(c, h(P))
            want = term if want is None else value_add(want, term)
        if got != want or (extra_check is not None and not extra_check(got)):
            failures.append(P)
    return FitResult(coeffs, not failures, failures)


def default_scalar_train(n: int) -> list[Polytope]:
    """Cube, cross-polytope and an asymmetric double pyramid."""
    if n == 2:
        dp = make_double_pyramid(DoublePyramidParams.planar(1, 3, 1, 1))
    else:
        base = box([-1] * (n - 1), [2] + [1] * (n - 2))
        dp = make_double_pyramid(DoublePyramidParams(base, 1, 2, [0] * (n - 1), [0] * (n - 1)))
    return [cube(n), cross_polytope(n), dp]


def default_vector_train(n: int) -> list[Polytope]:
    if n == 2:
        return [
            make_double_pyramid(ASYMMETRIC_R2),
            make_double_pyramid(DoublePyramidParams.planar(1, 2, 1, 2, mpq(1, 2), 0)),
        ]
    return default_scalar_train(n)[2:]


def random_holdout(budget: TrialBudget) -> list[Polytope]:
    return [trial_polytope(budget, t) for t in range(budget.trials)]


def fit_scalar_classification(mu: ValuationHandle, train: Sequence[Polytope], holdout: Sequence[Polytope]) -> FitResult:
    """Exact ``(k0, k1, k2)`` with ``mu = k0 chi + k1 V + k2 V(P*)`` from three training polytopes.

    Failing polytopes (training or holdout) are listed in ``holdout_failures``.
    """
    if mu.kind != SCALAR:
        raise WrongDimension("scalar fit needs a scalar valuation")
    if len(train) != 3:
        raise SingularTrainingSet("scalar fit takes exactly three training polytopes")
    basis = (CHI, VOLUME, POLAR_VOLUME)
    if la.det([[h(P) for h in basis] for P in train]) == 0:
        raise SingularTrainingSet("chi, V, V(P*) are linearly dependent on the training set")
    return _fit(mu, basis, train, holdout)


def fit_vector_classification(mu: ValuationHandle, n: int, train: Sequence[Polytope], holdout: Sequence[Polytope]) -> FitResult:
    """``(k1, k2)`` against ``m, rot m(P*)`` for n = 2; ``k`` against ``m`` for n >= 3."""
    if mu.kind != VECTOR:
        raise WrongDimension("vector fit needs a vector valuation")
    basis = (MOMENT, ROT_POLAR_MOMENT) if n == 2 else (MOMENT,)
    return _fit(mu, basis, train, holdout)


def _is_symmetric(m) -> bool:
    return m == la.transpose(m)


def fit_matrix_classification(
    mu: ValuationHandle,
    train: Sequence[Polytope],
    holdout: Sequence[Polytope],
    screen: TrialBudget | None = None,
) -> FitResult:
    """``k`` with ``mu = k M2``; holdout also demands ``mu(P)`` symmetric.

    With ``screen`` set, a gl_covariant equivariance check runs first and a
    failure raises ScreeningFailed without attempting the fit.
    """
    if mu.kind != MATRIX:
        raise WrongDimension("matrix fit needs a matrix valuation")
    if screen is not None:
        report = check_equivariance(mu, "gl_covariant", screen)
        if not report.passed:
            raise ScreeningFailed(f"{mu.name} is not GL(n)-covariant", report)
    if not train:
        raise FitImpossible("no training polytope")
    return _fit(mu, (MOMENT_MATRIX,), train, holdout, extra_check=_is_symmetric)
