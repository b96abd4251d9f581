"""Exception hierarchy shared by all modules."""


class SelfAffineError(ValueError):
    """Base class for every error raised by this package."""


class SingularMatrix(SelfAffineError):
    pass


class NotExpanding(SelfAffineError):
    pass


class DuplicateDigit(SelfAffineError):
    pass


class NoConvergence(SelfAffineError):
    pass


class CandidateOverflow(SelfAffineError):
    pass


class BudgetExceeded(SelfAffineError):
    pass


class OscNotCertified(SelfAffineError):
    """Raised when an operation needs the open set condition and neither a
    residue certificate nor a user assertion is available."""


class NotDiagonal2x2(SelfAffineError):
    pass


class DigitOutOfFundamentalDomain(SelfAffineError):
    pass


class MatrixMismatch(SelfAffineError):
    pass


class NotPlanar(SelfAffineError):
    pass


class SpecFormatError(SelfAffineError):
    """Malformed system file; the message names the line or field."""
