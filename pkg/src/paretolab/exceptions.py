"""Exception hierarchy.

Each error carries an ``exit_code`` used by the command line: 2 for usage and
validation problems, 3 for numerical failures.
"""


class ParetoLabError(Exception):
    exit_code = 2


class OutOfRange(ParetoLabError, ValueError):
    pass


class NonFinite(ParetoLabError, ValueError):
    pass


class AlignmentMismatch(ParetoLabError, ValueError):
    pass


class EmptyInterior(ParetoLabError, ValueError):
    pass


class EmptyWindow(ParetoLabError, ValueError):
    pass


class NonPositiveSample(ParetoLabError, ValueError):
    pass


class NonPositiveDensity(ParetoLabError, ValueError):
    pass


class InsufficientData(ParetoLabError, ValueError):
    pass


class ResourceLimit(ParetoLabError, RuntimeError):
    pass


class NumericalFailure(ParetoLabError, ArithmeticError):
    exit_code = 3


class DegenerateDiscriminant(NumericalFailure):
    pass


class DegenerateSample(NumericalFailure):
    pass


class NoRoot(NumericalFailure):
    pass


class NoNegativeRoot(NumericalFailure):
    pass


class StationarityUnavailable(NumericalFailure):
    pass


class NotDissipative(NumericalFailure):
    pass
