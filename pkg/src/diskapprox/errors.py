"""Exception types raised across the package."""


class DiskApproxError(Exception):
    pass


class DomainError(DiskApproxError, ValueError):
    pass


class PrecisionUnreachable(DiskApproxError):
    pass


class UnsupportedProfile(DiskApproxError):
    pass


class NotLogIntegrable(DiskApproxError):
    """Raised when a construction needs a finite log-integral over an arc."""


class BranchError(DiskApproxError):
    """Raised when an evaluation point sits too close to the unit circle."""


class StructuralError(DiskApproxError):
    pass


class SelectionFailure(DiskApproxError):
    pass


class MajorizationFailure(DiskApproxError):
    pass


class EscalationExhausted(DiskApproxError):
    """Cholesky pivots failed at every rung of the precision ladder."""


class ScenarioError(DiskApproxError):
    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
