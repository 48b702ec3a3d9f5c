"""Exception hierarchy shared by every module."""


class LieGeomError(Exception):
    """Base class for errors raised by liegeom."""


class ContractError(LieGeomError, ValueError):
    """A caller violated a documented precondition (usually a dimension mismatch)."""


class UnsupportedOrderError(LieGeomError, ValueError):
    pass


class EvaluationError(LieGeomError, ArithmeticError):
    """A map could not be evaluated (or differentiated) at the requested point."""


class NonDifferentiableError(EvaluationError):
    pass


class OutOfDomainError(EvaluationError):
    """A point lies outside a chart domain, the carrier, or every chart of an atlas."""


class SingularMatrixError(EvaluationError):
    pass


class DegenerateRegionError(LieGeomError, ValueError):
    """A region has no usable samples, so nothing can be probed."""


class EmptySubmanifoldError(LieGeomError, ValueError):
    pass


class IncompatibleChartsError(LieGeomError):
    def __init__(self, pair, report):
        self.pair = pair
        self.report = report
        super().__init__(
            f"charts {pair[0]!r} and {pair[1]!r} are not smoothly compatible "
            f"(max residual {report.max_fd_residual:.3g}, {len(report.failures)} failures)"
        )


class NotALieGroupError(LieGeomError):
    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


class InconclusiveSpanError(LieGeomError, ArithmeticError):
    """The sampled component matrix is rank deficient; span membership cannot be decided."""
