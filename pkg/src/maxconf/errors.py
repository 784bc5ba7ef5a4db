"""Exception hierarchy shared by every module of the package."""


class MaxConfError(Exception):
    """Base class for all errors raised by maxconf."""


class NotHermitian(MaxConfError, ValueError):
    pass


class NotPSD(MaxConfError, ValueError):
    pass


class DimMismatch(MaxConfError, ValueError):
    pass


class BadRank(MaxConfError, ValueError):
    pass


class InvalidEnsemble(MaxConfError, ValueError):
    """Raised when an operation needs a valid ensemble and gets something else.

    The offending violations are kept on ``violations``.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class ParseError(MaxConfError, ValueError):
    """Malformed input document. ``field`` names where the problem sits."""

    def __init__(self, message, field=None, line=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
        self.field = field
        self.line = line


class ValidationError(MaxConfError, ValueError):
    """A well-formed document whose content breaks a domain invariant."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class UndefinedConfidence(MaxConfError, ArithmeticError):
    pass


class SolverStall(MaxConfError, RuntimeError):
    pass


class DimCapExceeded(MaxConfError, ValueError):
    pass


class NotInMembershipSet(MaxConfError, ValueError):
    pass


class PartNotConverged(MaxConfError, ValueError):
    pass


class ScaleCapExceeded(MaxConfError, ValueError):
    pass


class CertificateInvalid(MaxConfError, ValueError):
    """``failed`` lists the names of the checks that did not pass."""

    def __init__(self, message, failed=()):
        super().__init__(message)
        self.failed = list(failed)
