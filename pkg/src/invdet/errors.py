"""Exception hierarchy shared by every module of the package."""


class InvdetError(Exception):
    """Base class for all package errors."""


class RankDeficient(InvdetError, ValueError):
    """A matrix expected to have full column rank does not."""


class NotPositiveDefinite(InvdetError, ValueError):
    pass


class SingularBlock(InvdetError, ValueError):
    """A block that must be inverted is (numerically) singular."""


class DimensionMismatch(InvdetError, ValueError):
    pass


class DuplicateFrequency(InvdetError, ValueError):
    pass


class ZeroDirection(InvdetError, ValueError):
    pass


class InvariantMismatch(InvdetError, ValueError):
    """Two statistics do not share the same maximal invariant."""


class DomainError(InvdetError, ValueError):
    pass


class QuadratureNotConverged(InvdetError, ArithmeticError):
    pass


class NotBracketable(InvdetError, ValueError):
    """Requested false-alarm probability lies outside the achievable range."""


class InsufficientTrials(InvdetError, ValueError):
    pass
