class ComputationError(Exception):
    """Base class for failures of a validated computation"""


class DomainError(ComputationError):
    pass


class EmptyIntersection(ComputationError):
    pass


class SingularMatrix(ComputationError):
    pass


class Divergence(ComputationError):
    pass


class StepRejected(ComputationError):
    pass


class NoCrossing(ComputationError):
    pass


class TangencyRisk(ComputationError):
    pass


class SignAmbiguous(ComputationError):
    pass


class ComplexEigenvalues(ComputationError):
    pass


class DegenerateMultiplier(ComputationError):
    pass


class UnsupportedSection(ComputationError):
    pass
