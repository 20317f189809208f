"""``valuation-lab`` command line.

Every invocation prints exactly one JSON document on stdout. Exit status is 0
on success or a passing check, 1 on a failing check or fit, and 2 on bad
input, in which case the document is ``{"error": code, "detail": text}``.
"""

from __future__ import annotations

import re
import sys
from pathlib import Path

import click

from . import linalg as la
from . import serialization as ser
from .classification import (
    check_homogeneous_solution,
    check_inhomogeneous_functional_eq,
    default_scalar_train,
    default_vector_train,
    dim1_even_representation,
    dim1_odd_representation,
    ExactLog,
    extract_F_from_moment,
    fit_F_quadratic,
    fit_matrix_classification,
    fit_scalar_classification,
    fit_vector_classification,
    random_holdout,
)
from .errors import InputError, InvalidConfiguration, OriginNotInterior, ScreeningFailed, ValuationLabError
from .functionals import NAMED, ValuationHandle, linear_combination
from .geometry import Polytope, box, contains_origin_interior, convex_hull, cross_polytope, cube, polar
from .harness import EquivarianceMode, TrialBudget, check_equivariance, check_valuation_identity, random_polytope, trial_rng
from .pyramids import DoublePyramidParams, is_double_pyramid, make_double_pyramid

SEED_ENV = "VALUATION_LAB_SEED"

# -- mu expressions -------------------------------------------------------------

ALIASES = {"χ": "chi"}
_NAMES = sorted(list(NAMED) + list(ALIASES), key=len, reverse=True)
_TERM = re.compile(
    r"\s*(?P<sign>[+-])?\s*(?:(?P<coef>\d+(?:/\d+)?)\s*\*\s*)?(?P<name>"
    + "|".join(re.escape(n) for n in _NAMES)
    + r")(?=\s*(?:[+-]|$))"
)


def parse_mu(expr: str) -> tuple[ValuationHandle, list]:
    """Parse ``"2*m-5*rot-polar-m"`` into a handle and its ``(coef, name)`` terms.

    Only rational-linear combinations of the named handles are accepted.
    """
    pos, terms = 0, []
    expr = expr.strip()
    if not expr:
        raise InputError("empty mu expression")
    while pos < len(expr):
        m = _TERM.match(expr, pos)
        if m is None or (terms and m.group("sign") is None):
            raise InputError(f"cannot parse mu expression at {expr[pos:]!r}")
        coef = la.rational(m.group("coef") or 1)
        if m.group("sign") == "-":
            coef = -coef
        name = ALIASES.get(m.group("name"), m.group("name"))
        terms.append((coef, name))
        pos = m.end()
    handle = linear_combination([(c, NAMED[n]) for c, n in terms], name=expr)
    return handle, terms


# -- plumbing -------------------------------------------------------------------

def _emit(doc, status: int = 0):
    click.echo(ser.dumps(doc))
    raise SystemExit(status)


def _read_json(source: str):
    if source == "-":
        return ser.loads(sys.stdin.read())
    s = source.lstrip()
    if s.startswith("{") or s.startswith("["):
        return ser.loads(s)
    path = Path(source)
    if not path.is_file():
        raise InputError(f"no such file: {source}")
    return ser.loads(path.read_text())


def _load_polytope(arg: str | None, input_file: str | None) -> Polytope:
    source = input_file or arg
    if source is None:
        raise InputError("no polytope given (pass inline JSON, a path, or --input FILE)")
    P = ser.polytope_from_json(_read_json(source))
    if not contains_origin_interior(P):
        raise OriginNotInterior("the origin is not an interior point of the polytope")
    return P


def _load_polytope_list(source: str) -> list[Polytope]:
    doc = _read_json(source)
    if not isinstance(doc, list):
        raise InputError("expected a JSON list of polytopes")
    out = []
    for obj in doc:
        P = ser.polytope_from_json(obj)
        if not contains_origin_interior(P):
            raise OriginNotInterior("a listed polytope does not contain the origin in its interior")
        out.append(P)
    return out


def _budget(trials, dim, coeff_bound, seed) -> TrialBudget:
    try:
        return TrialBudget(trials=trials, dimension=dim, coefficient_bound=coeff_bound, seed=seed)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _summary(msg: str):
    click.echo(msg, err=True)


def _report(report, label: str):
    _summary(f"{label}: {'passed' if report.passed else 'FAILED'} ({report.trials} trials, seed {report.seed})")
    _emit(ser.report_to_json(report), 0 if report.passed else 1)


def _fit_out(result, label: str):
    coeffs = ", ".join(la.fmt(c) for c in result.coefficients)
    _summary(f"{label}: coefficients [{coeffs}], residual {'ok' if result.residual_ok else 'NOT ok'}")
    _emit(ser.fit_result_to_json(result), 0 if result.residual_ok else 1)


def _rat(ctx, param, value):
    if value is None:
        return None
    try:
        return la.rational(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise click.BadParameter(f"{value!r} is not an exact rational") from exc


def _rat_list(ctx, param, value):
    if value is None:
        return None
    return [_rat(ctx, param, v) for v in value.split(",")]


dim_opt = click.option("--dim", type=click.IntRange(1), default=2, show_default=True, help="Ambient dimension.")
seed_opt = click.option("--seed", type=int, envvar=SEED_ENV, default=0, show_default=True, help=f"Seed (default from ${SEED_ENV}).")
bound_opt = click.option("--coeff-bound", type=click.IntRange(1), default=4, show_default=True, help="Bound on random rationals.")
input_opt = click.option("--input", "input_file", type=str, default=None, help="Read the polytope from FILE.")


def trials_opt(default):
    return click.option("--trials", type=click.IntRange(1), default=default, show_default=True)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def cli():
    """Exact polytope valuations: compute, generate, check and fit."""


# -- compute / polar --------------------------------------------------------------

_COMPUTE = {"volume": "V", "moment": "m", "moment-matrix": "M2", "euler": "chi"}


@cli.command()
@click.argument("target", type=click.Choice(sorted(_COMPUTE)))
@click.argument("polytope", required=False)
@input_opt
def compute(target, polytope, input_file):
    """Exact value of a functional on POLYTOPE (inline JSON, path, or -)."""
    P = _load_polytope(polytope, input_file)
    _emit({"value": ser.value_to_json(NAMED[_COMPUTE[target]](P))})


@cli.command("polar")
@click.argument("polytope", required=False)
@input_opt
def polar_cmd(polytope, input_file):
    """Polar body of POLYTOPE."""
    _emit(ser.polytope_to_json(polar(_load_polytope(polytope, input_file))))


# -- generate -----------------------------------------------------------------------

@cli.group()
def generate():
    """Print a polytope."""


@generate.command("cube")
@dim_opt
@click.option("--radius", callback=_rat, default="1", show_default=True)
def gen_cube(dim, radius):
    _emit(ser.polytope_to_json(cube(dim, radius)))


@generate.command("cross")
@dim_opt
@click.option("--radius", callback=_rat, default="1", show_default=True)
def gen_cross(dim, radius):
    _emit(ser.polytope_to_json(cross_polytope(dim, radius)))


@generate.command("random")
@dim_opt
@seed_opt
@bound_opt
def gen_random(dim, seed, coeff_bound):
    rng = trial_rng(seed, 0, "generate")
    _emit(ser.polytope_to_json(random_polytope(rng, dim, coeff_bound)))


@generate.command("double-pyramid")
@dim_opt
@click.option("--a", callback=_rat, default="1", show_default=True, help="Base reaches -a along each base axis.")
@click.option("--b", callback=_rat, default="1", show_default=True, help="Base reaches +b along each base axis.")
@click.option("--c", callback=_rat, default="1", show_default=True, help="Lower apex height.")
@click.option("--d", callback=_rat, default="1", show_default=True, help="Upper apex height.")
@click.option("--x", callback=_rat_list, default=None, help="Lower apex offset, comma separated.")
@click.option("--y", callback=_rat_list, default=None, help="Upper apex offset, comma separated.")
def gen_double_pyramid(dim, a, b, c, d, x, y):
    """Hull of the box base [-a, b]^(dim-1) and apexes -c(x,1), d(y,1)."""
    if dim < 2:
        raise InputError("double pyramids need --dim >= 2")
    if a <= 0 or b <= 0:
        raise InvalidConfiguration("a and b must be positive")
    k = dim - 1
    x = x if x is not None else [0] * k
    y = y if y is not None else [0] * k
    base = convex_hull([(-a,), (b,)]) if k == 1 else box([-a] * k, [b] * k)
    p = DoublePyramidParams(base, c, d, x, y)
    if not is_double_pyramid(p):
        raise InvalidConfiguration("apex offsets too large: the section at height 0 is not the base")
    _emit(ser.polytope_to_json(make_double_pyramid(p)))


# -- check -----------------------------------------------------------------------------

@cli.group()
def check():
    """Run a seeded exact check and print a report."""


def _target_handle(target, mu):
    if (target is None) == (mu is None):
        raise InputError("pass exactly one of --target NAME or --mu EXPR")
    if target is not None:
        name = ALIASES.get(target, target)
        if name not in NAMED:
            raise InputError(f"unknown valuation {target!r}; known: {', '.join(NAMED)}")
        return NAMED[name]
    return parse_mu(mu)[0]


@check.command("valuation")
@click.option("--target", default=None, help="Named valuation, e.g. V or polar-m.")
@click.option("--mu", default=None, help="Linear combination, e.g. '2*m-5*rot-polar-m'.")
@trials_opt(100)
@dim_opt
@seed_opt
@bound_opt
def check_valuation(target, mu, trials, dim, seed, coeff_bound):
    handle = _target_handle(target, mu)
    _report(check_valuation_identity(handle, _budget(trials, dim, coeff_bound, seed)), f"valuation {handle.name}")


@check.command("equivariance")
@click.option("--target", default=None)
@click.option("--mu", default=None)
@click.option("--mode", required=True, type=click.Choice([m.value for m in EquivarianceMode]))
@trials_opt(100)
@dim_opt
@seed_opt
@bound_opt
def check_equivariance_cmd(target, mu, mode, trials, dim, seed, coeff_bound):
    handle = _target_handle(target, mu)
    report = check_equivariance(handle, mode, _budget(trials, dim, coeff_bound, seed))
    _report(report, f"{mode} {handle.name}")


@check.command("functional-eq")
@click.option("--k", callback=_rat, default=None, help="Quadratic coefficient (default: fitted from m).")
@click.option("--kt", callback=_rat, default=None, help="Constant term (default: fitted from m).")
@click.option("--from-moment", is_flag=True, help="Use F(r) read off the moment vector instead of k r^2 + kt.")
@click.option("--homogeneous", is_flag=True, help="Check G(u)=u^2 against the homogeneous equation instead.")
@trials_opt(100)
@seed_opt
@bound_opt
def check_functional_eq(k, kt, from_moment, homogeneous, trials, seed, coeff_bound):
    """Inhomogeneous equation for F = k r^2 + kt (or the moment-derived F)."""
    budget = _budget(trials, 2, coeff_bound, seed)
    if homogeneous:
        _report(check_homogeneous_solution(budget), "homogeneous equation, G(u)=u^2")
    if k is None or kt is None:
        fk, fkt = fit_F_quadratic()
        k = fk if k is None else k
        kt = fkt if kt is None else kt
    if from_moment:
        label = f"inhomogeneous equation, F from m, kt={la.fmt(kt)}"
        _report(check_inhomogeneous_functional_eq(k, kt, budget, F=extract_F_from_moment), label)
    sign = "-" if kt < 0 else "+"
    label = f"inhomogeneous equation, F(r)={la.fmt(k)} r^2 {sign} {la.fmt(abs(kt))}"
    _report(check_inhomogeneous_functional_eq(k, kt, budget), label)


@check.command("dim1")
@click.option("--parity", type=click.Choice(["even", "odd"]), required=True)
@click.option("--q", type=int, required=True, help="Homogeneity degree.")
@click.option("--const", "const", callback=_rat, default="1", show_default=True)
@trials_opt(100)
@seed_opt
@bound_opt
def check_dim1(parity, q, const, trials, seed, coeff_bound):
    """Segment family const(a^q + b^q) (even), const(b^q - a^q) or const ln(b/a) (odd, q=0)."""
    budget = _budget(trials, 1, coeff_bound, seed)
    if parity == "even":
        mu = lambda I: const * (I.a ** q + I.b ** q)  # noqa: E731
        _report(dim1_even_representation(mu, budget, q), f"dim1 even, q={q}")
    if q == 0:
        mu = lambda I: ExactLog.of(I.b / I.a) * const  # noqa: E731
    else:
        mu = lambda I: const * (I.b ** q - I.a ** q)  # noqa: E731
    _report(dim1_odd_representation(mu, budget, q), f"dim1 odd, q={q}")


# -- fit ---------------------------------------------------------------------------------

@cli.group()
def fit():
    """Fit a valuation against a classification basis."""


def _fit_sets(train_file, holdout_file, default_train, trials, dim, coeff_bound, seed):
    train = _load_polytope_list(train_file) if train_file else default_train
    if holdout_file:
        holdout = _load_polytope_list(holdout_file)
    else:
        holdout = random_holdout(_budget(trials, dim, coeff_bound, seed))
    for P in train + holdout:
        if P.dim != dim:
            raise InputError(f"polytope of dimension {P.dim} with --dim {dim}")
    return train, holdout


def fit_options(f):
    for opt in reversed([
        click.option("--mu", required=True, help="Valuation to fit, e.g. '2*m-5*rot-polar-m'."),
        dim_opt,
        click.option("--train", "train_file", default=None, help="JSON list of training polytopes."),
        click.option("--holdout", "holdout_file", default=None, help="JSON list of holdout polytopes."),
        trials_opt(20),
        seed_opt,
        bound_opt,
    ]):
        f = opt(f)
    return f


@fit.command("scalar")
@fit_options
def fit_scalar(mu, dim, train_file, holdout_file, trials, seed, coeff_bound):
    """Coefficients against chi, V, polar-V."""
    handle = parse_mu(mu)[0]
    train, holdout = _fit_sets(train_file, holdout_file, default_scalar_train(dim), trials, dim, coeff_bound, seed)
    _fit_out(fit_scalar_classification(handle, train, holdout), f"scalar fit of {mu}")


@fit.command("vector")
@fit_options
def fit_vector(mu, dim, train_file, holdout_file, trials, seed, coeff_bound):
    """Coefficients against m, rot-polar-m (dim 2) or m (dim >= 3)."""
    handle = parse_mu(mu)[0]
    train, holdout = _fit_sets(train_file, holdout_file, default_vector_train(dim), trials, dim, coeff_bound, seed)
    _fit_out(fit_vector_classification(handle, dim, train, holdout), f"vector fit of {mu}")


@fit.command("matrix")
@fit_options
@click.option("--screen/--no-screen", default=False, help="Require gl_covariance before fitting.")
def fit_matrix(mu, dim, train_file, holdout_file, trials, seed, coeff_bound, screen):
    """Coefficient against M2."""
    handle = parse_mu(mu)[0]
    train, holdout = _fit_sets(train_file, holdout_file, [cube(dim)], trials, dim, coeff_bound, seed)
    budget = _budget(trials, dim, coeff_bound, seed) if screen else None
    try:
        result = fit_matrix_classification(handle, train, holdout, screen=budget)
    except ScreeningFailed as exc:
        _summary(f"matrix fit of {mu}: {exc}")
        _emit(ser.report_to_json(exc.report), 1)
    _fit_out(result, f"matrix fit of {mu}")


# -- entry point ------------------------------------------------------------------------

def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="valuation-lab", standalone_mode=False)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 0
    except ValuationLabError as exc:
        click.echo(ser.dumps({"error": exc.code, "detail": str(exc)}))
        _summary(f"error: {exc}")
        return 2
    except click.exceptions.Abort:
        return 2
    except click.ClickException as exc:
        click.echo(ser.dumps({"error": "usage", "detail": exc.format_message()}))
        _summary(f"usage error: {exc.format_message()}")
        return 2
    return 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
