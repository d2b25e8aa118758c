"""Exception hierarchy shared by every module."""


class CPStarError(Exception):
    """Base class for all errors raised by the package."""


class ShapeMismatch(CPStarError, ValueError):
    pass


class BackendMismatch(CPStarError, ValueError):
    pass


class NotHermitian(CPStarError, ValueError):
    pass


class NotPSD(CPStarError, ValueError):
    pass


class Singular(CPStarError, ValueError):
    pass


class NotValidated(CPStarError):
    pass


class NotNormalisable(CPStarError):
    pass


class CertificateFailure(CPStarError):
    """A closure operation produced a morphism whose certificate did not verify."""


class NotCommutative(CPStarError):
    pass


class NotNormalised(CPStarError):
    pass


class NotStochastic(CPStarError, ValueError):
    pass


class CompletenessFailure(CPStarError):
    pass


class NonIntegralFactor(CPStarError):
    pass


class NotAGroupoid(CPStarError):
    pass


class NoSquareRoot(CPStarError):
    pass


class MembershipFailure(CPStarError):
    pass


class ParseError(CPStarError, ValueError):
    pass
