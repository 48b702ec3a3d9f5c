"""Numerical differential geometry and Lie theory on embedded manifolds.

Smoothness is probed with higher-order forward-mode jets checked against
finite differences; every "for all points" statement is checked at the
samples carried by each region.
"""

from .errors import (
    ContractError,
    DegenerateRegionError,
    EmptySubmanifoldError,
    EvaluationError,
    InconclusiveSpanError,
    IncompatibleChartsError,
    LieGeomError,
    NonDifferentiableError,
    NotALieGroupError,
    OutOfDomainError,
    SingularMatrixError,
    UnsupportedOrderError,
)

__version__ = "0.1.0"
