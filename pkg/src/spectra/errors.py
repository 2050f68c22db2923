"""Exception hierarchy shared across the package."""


class SpectraError(Exception):
    """Base class for all library errors."""


# ensembles
class NonDivisible(SpectraError, ValueError):
    pass


class BadSpec(SpectraError, ValueError):
    pass


class AsymmetricPattern(SpectraError, ValueError):
    pass


# eig
class NoConvergence(SpectraError, RuntimeError):
    pass


class NumericalFailure(NoConvergence):
    """Gram matrix produced an eigenvalue too negative to be roundoff."""


# measures
class CountMismatch(SpectraError, ValueError):
    pass


class BadWeightExponent(SpectraError, ValueError):
    pass


class OmegaTooLarge(SpectraError, ValueError):
    pass


# moments
class EmptyMeasure(SpectraError, ValueError):
    pass


class TooLarge(SpectraError, ValueError):
    pass


class BadParams(SpectraError, ValueError):
    pass


# stats
class Empty(SpectraError, ValueError):
    pass


class BadR(SpectraError, ValueError):
    pass


# driver
class MissingRecords(SpectraError, ValueError):
    pass
