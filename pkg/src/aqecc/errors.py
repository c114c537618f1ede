"""Exception types raised by the library.

All of them derive from :class:`AqeccError` (itself a ``ValueError``) so the
CLI can map every domain failure onto exit status 1.
"""


class AqeccError(ValueError):
    pass


class ParityError(AqeccError):
    pass


class RangeError(AqeccError):
    pass


class CapacityError(AqeccError):
    pass


class BudgetError(AqeccError):
    pass


class ShapeError(AqeccError):
    pass


class OrthogonalityError(AqeccError):
    pass


class ConvergenceError(AqeccError):
    pass


class EmptyWindowError(AqeccError):
    pass


class InsufficientDataError(AqeccError):
    pass


class PopulationError(AqeccError):
    pass


class DataError(AqeccError):
    pass
