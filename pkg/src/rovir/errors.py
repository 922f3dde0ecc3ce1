"""Exception hierarchy.

Errors split into two families so the command line can map them onto
stable exit codes: :class:`ValidationError` (bad input, exit 2) and
:class:`NumericalError` (well-formed input the numerics cannot handle,
exit 3).
"""

import numpy as np


class RovirError(Exception):
    """Base class for all package errors."""


class ValidationError(RovirError, ValueError):
    pass


class NumericalError(RovirError, ArithmeticError):
    pass


class NotPositiveDefinite(NumericalError, np.linalg.LinAlgError):
    """Cholesky hit a non-positive pivot; regularize B first."""


class ZeroDenominator(NumericalError):
    """Interference energy retained by a weight set is (numerically) zero."""


class RankDeficient(NumericalError):
    pass


class DimensionMismatch(ValidationError):
    pass


class DimensionError(ValidationError):
    pass


class InvalidNv(ValidationError):
    pass


class SubspaceExhausted(ValidationError):
    pass


class InfeasiblePrefix(ValidationError):
    pass


class NotDiagonal(ValidationError):
    pass


class EmptyMask(ValidationError):
    pass


class ZeroTrace(ValidationError):
    """The interference Gram matrix carries no energy at all."""


class InvalidSpec(ValidationError):
    pass
