"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class CdcError(Exception):
    """Base class for all package errors."""


class GeneratorError(CdcError, ValueError):
    """A matrix failed one of the standard-semigroup axioms."""

    def __init__(self, message: str, indices: tuple[int, ...] = ()):
        super().__init__(message)
        self.indices = indices


class NotConservative(GeneratorError):
    pass


class NotPositivityPreserving(GeneratorError):
    pass


class NotSymmetric(GeneratorError):
    pass


class EigenFailure(CdcError, ArithmeticError):
    pass


class KernelComponent(CdcError, ValueError):
    """Square functions diverge on fields with a ker(L) component."""


class ResonanceDivergence(CdcError, ArithmeticError):
    pass


class NegativeInput(CdcError, ValueError):
    pass


class CurvatureFailed(CdcError, ValueError):
    """The curvature precondition Gamma_2 >= 0 does not hold."""


class GroupError(CdcError, ValueError):
    pass


class NotSymmetricPsi(GroupError):
    pass


class NonzeroAtIdentity(GroupError):
    pass


class NotConditionallyNegative(GroupError):
    pass


class ConfigError(CdcError, ValueError):
    def __init__(self, message: str, field: str = ""):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class SuiteFailure(CdcError):
    def __init__(self, suite: str, failed: list[str]):
        super().__init__(f"suite {suite!r} failed: {', '.join(failed)}")
        self.suite = suite
        self.failed = failed
