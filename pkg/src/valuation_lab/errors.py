"""Exception hierarchy.

Every error carries a short machine-readable ``code`` used by the CLI.
"""


class ValuationLabError(Exception):
    code = "error"


class DegenerateInput(ValuationLabError):
    code = "degenerate_input"


class OriginNotInterior(ValuationLabError):
    code = "origin_not_interior"


class SingularMap(ValuationLabError):
    code = "singular_map"


class EmptyOrDegenerateIntersection(ValuationLabError):
    code = "empty_or_degenerate_intersection"


class NonConvexUnion(ValuationLabError):
    code = "non_convex_union"


class InvalidSlab(ValuationLabError):
    code = "invalid_slab"


class DimensionMismatch(ValuationLabError):
    code = "dimension_mismatch"


class WrongDimension(ValuationLabError):
    code = "wrong_dimension"


class GeneratorExhausted(ValuationLabError):
    code = "generator_exhausted"


class UnsupportedExponent(ValuationLabError):
    code = "unsupported_exponent"


class InvalidConfiguration(ValuationLabError):
    code = "invalid_configuration"


class FitImpossible(ValuationLabError):
    code = "fit_impossible"


class SingularTrainingSet(ValuationLabError):
    code = "singular_training_set"


class NotEven(ValuationLabError):
    code = "not_even"


class NotOdd(ValuationLabError):
    code = "not_odd"


class ScreeningFailed(ValuationLabError):
    """Raised when a handle fails the equivariance pre-screen of a fitter."""

    code = "screening_failed"

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InputError(ValuationLabError):
    code = "input_error"
