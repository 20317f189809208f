"""Seeded valuation and equivariance checks, including a failing one."""

from valuation_lab import MOMENT, ROT_POLAR_MOMENT, VOLUME, ValuationHandle, check_equivariance
from valuation_lab import check_valuation_identity, replay, TrialBudget
from valuation_lab.serialization import dumps, report_to_json

budget = TrialBudget(trials=50, dimension=2, seed=11)

print("V valuation:", check_valuation_identity(VOLUME, budget).passed)
print("m vl-covariant:", check_equivariance(MOMENT, "vl_covariant", budget).passed)
print("rot-polar-m signum-covariant:", check_equivariance(ROT_POLAR_MOMENT, "vl_signum_covariant", budget).passed)

square = ValuationHandle("V^2", "scalar", lambda P: VOLUME(P) ** 2)
report = check_valuation_identity(square, budget)
print("V^2 valuation:", report.passed, "first failing trial", report.counterexample["trial"])
print("replays:", replay(square, report.counterexample))
print(dumps(report_to_json(report))[:200], "...")
