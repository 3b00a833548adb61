"""Exception hierarchy shared by all modules."""


class FundomError(Exception):
    """Base class for every error raised by the package."""


class NumericalFailure(FundomError):
    """A numerical procedure failed (maps to CLI exit code 3)."""


# evaluation
class PoleError(FundomError):
    def __init__(self, z, msg=None):
        self.z = z
        super().__init__(msg or f"evaluation at a pole: {z!r}")


class EssentialPointError(FundomError):
    def __init__(self, z, msg=None):
        self.z = z
        super().__init__(msg or f"evaluation at an essential singularity: {z!r}")


class AccuracyError(FundomError):
    pass


class DomainError(FundomError):
    pass


# tracing
class NoSeedsFound(FundomError):
    pass


class SeedInvalid(FundomError):
    pass


class StepCollapse(NumericalFailure):
    def __init__(self, msg, last_point=None, partial=None):
        super().__init__(msg)
        self.last_point = last_point
        self.partial = partial


class HigherOrderCritical(NumericalFailure):
    def __init__(self, at, msg=None):
        self.at = at
        super().__init__(msg or f"critical point of order > 1 near {at!r}")


# critical points
class BracketFailure(NumericalFailure):
    pass


class CountMismatch(NumericalFailure):
    def __init__(self, found, expected, msg=None):
        self.found = found
        self.expected = expected
        super().__init__(msg or f"found {found} zeros, argument principle counts {expected}")


class IsolationFailure(FundomError):
    pass


# domains
class IncompleteBoundary(FundomError):
    pass


class OrderingAmbiguity(FundomError):
    pass


class LiftMismatch(NumericalFailure):
    pass


class CurveCrossing(NumericalFailure):
    pass


class OnBoundary(FundomError):
    pass


class OutsideAtlas(FundomError):
    pass


# covering group
class DomainMissing(FundomError):
    pass


class NewtonEscape(NumericalFailure):
    pass


class AtInfinity(FundomError):
    pass


class ConfigError(FundomError):
    """Invalid run configuration (maps to CLI exit code 2)."""
