"""Exception classes raised by c2convex."""


class C2ConvexError(Exception):
    """Base class for all library errors."""


class OutOfDomain(C2ConvexError, ValueError):
    pass


class DomainMismatch(C2ConvexError, ValueError):
    pass


class NotContinuous(C2ConvexError, ValueError):
    def __init__(self, msg, location=None, value=None):
        super().__init__(msg)
        self.location = location
        self.value = value


class NotConvex(C2ConvexError, ValueError):
    """Raised with the witnessing breakpoint or segment and the violating value."""

    def __init__(self, msg, location=None, value=None):
        super().__init__(msg)
        self.location = location
        self.value = value


class BudgetTooTight(C2ConvexError):
    pass


class InfeasibleCentroid(C2ConvexError, ValueError):
    pass


class ResidualInfeasible(C2ConvexError):
    pass


class NegativeDensity(C2ConvexError, ValueError):
    pass


class CertificateViolated(C2ConvexError, AssertionError):
    """A proven bound failed; always an implementation bug."""


class Infeasible(C2ConvexError):
    def __init__(self, reason, msg=None):
        super().__init__(msg or f"bridge infeasible: {reason}")
        self.reason = reason


class ShrinkExhausted(C2ConvexError):
    def __init__(self, msg, location=None):
        super().__init__(msg)
        self.location = location


class NotC2OnFlanks(C2ConvexError):
    pass


class TangentGapNegative(C2ConvexError):
    pass


class GlueInfeasible(C2ConvexError):
    pass


class AgreementPreconditionFailed(C2ConvexError):
    pass


class NonConvergence(C2ConvexError):
    pass


class ContractViolation(C2ConvexError):
    """Base for the output contracts checked by ``verify``; carries the report."""

    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


class C2ResidualExceeded(ContractViolation):
    pass


class NotConvexOutput(ContractViolation):
    pass


class MeasureExceeded(ContractViolation):
    pass


class ProfileExceeded(ContractViolation):
    pass
