"""Exception hierarchy.

Class names double as the error codes printed by the command-line front end.
"""


class RobustHedgeError(Exception):
    """Base class for every error raised by this package."""


class TreeError(RobustHedgeError, ValueError):
    pass


class DuplicateId(TreeError):
    pass


class OrphanNode(TreeError):
    pass


class TimeSkew(TreeError):
    pass


class ChildlessInterior(TreeError):
    pass


class NonFinitePrice(TreeError):
    pass


class NonScalarPrice(TreeError):
    pass


class RootError(TreeError):
    pass


class UnknownLeaf(RobustHedgeError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnknownNode(RobustHedgeError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class MissingStrategyNode(RobustHedgeError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class ShapeMismatch(RobustHedgeError, ValueError):
    pass


class ModelError(RobustHedgeError, ValueError):
    pass


class InfeasibleInterval(ModelError):
    pass


class NoViableModel(ModelError):
    pass


class NotMartingale(ModelError):
    pass


class NumericalFailure(RobustHedgeError, ArithmeticError):
    pass


class EmptySupport(RobustHedgeError, ValueError):
    pass


class InconsistentInstance(RobustHedgeError, ValueError):
    pass


class TooLarge(RobustHedgeError, ValueError):
    pass


class NotConvergent(RobustHedgeError, ValueError):
    pass
