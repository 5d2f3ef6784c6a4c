"""Exception types raised across the package."""


class KpSignError(Exception):
    """Base class for all library errors."""


class InputError(KpSignError, ValueError):
    """Invalid user input (maps to CLI exit code 2)."""


class DuplicateKappa(InputError):
    pass


class RankDeficient(InputError):
    pass


class ZeroRow(InputError):
    pass


class ZeroColumn(InputError):
    pass


class BadDimension(InputError):
    pass


class DomainMismatch(InputError):
    pass


class NonpositiveWeight(InputError):
    pass


class EmptyFamily(InputError):
    pass


class BadRange(InputError):
    pass


class BadIndex(InputError):
    pass


class InequalityViolated(InputError):
    pass


class ParseError(InputError):
    pass


class LimitExceeded(InputError):
    pass


class SingularPoint(KpSignError, ArithmeticError):
    """tau is numerically zero at the requested point."""


class SingularLocus(KpSignError, ArithmeticError):
    """tau vanishes exactly at the requested weights."""


class InternalInconsistency(KpSignError, AssertionError):
    """An identity that must hold exactly failed; indicates a bug."""
