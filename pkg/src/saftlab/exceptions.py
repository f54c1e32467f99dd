"""Exception and warning types raised across saftlab."""


class SaftlabError(Exception):
    """Base class for all library errors."""


class InvalidMatrixError(SaftlabError, ValueError):
    """Parameter matrix violates unimodularity or another structural rule."""


class MatrixParseError(InvalidMatrixError):
    """Matrix text or JSON could not be parsed (missing field, bad number, unknown preset)."""


class DegenerateBError(InvalidMatrixError):
    """An integral-transform path was asked to run with B == 0."""


class GridMismatchError(SaftlabError, ValueError):
    """A spectrum grid was not produced by this library's grid convention."""


class TailNotConvergedError(SaftlabError, RuntimeError):
    """A periodization sum did not converge within the allowed number of terms."""


class NotRefinableError(SaftlabError, ValueError):
    """The two-scale relation residual is too large for the given scaling function."""


class AdmissibilityError(SaftlabError, ValueError):
    """The wavelet is not admissible (C_psi is zero or diverges)."""


class QMFError(SaftlabError, ValueError):
    """A filter pair fails the quadrature-mirror conditions."""


class TruncationWarning(UserWarning):
    """Signal energy is not contained in the sampling window."""
