"""Recover classification coefficients of known combinations and spot a non-member."""

from valuation_lab import POLAR_MOMENT, basis_valuation_scalar, basis_valuation_vector_2d
from valuation_lab import TrialBudget
from valuation_lab.classification import (
    default_scalar_train,
    default_vector_train,
    fit_F_quadratic,
    fit_scalar_classification,
    fit_vector_classification,
    random_holdout,
    verify_R2_against_moment,
)
from valuation_lab.linalg import fmt, mpq

holdout = random_holdout(TrialBudget(trials=10, dimension=2, seed=3))

mu = basis_valuation_scalar(3, mpq(-1, 2), 2)
fit = fit_scalar_classification(mu, default_scalar_train(2), holdout)
print("scalar", [fmt(c) for c in fit.coefficients], fit.residual_ok)

mu = basis_valuation_vector_2d(2, -5)
fit = fit_vector_classification(mu, 2, default_vector_train(2), holdout)
print("vector", [fmt(c) for c in fit.coefficients], fit.residual_ok)

# the polar moment vector is not in the covariant family
fit = fit_vector_classification(POLAR_MOMENT, 2, default_vector_train(2), holdout)
print("polar-m", fit.residual_ok, len(fit.holdout_failures), "failures")

r2 = verify_R2_against_moment(TrialBudget(trials=50, dimension=2, seed=5))
print("double pyramid constant", fmt(r2.coefficients[0]), r2.residual_ok)
print("quadratic F", [fmt(c) for c in fit_F_quadratic()])
