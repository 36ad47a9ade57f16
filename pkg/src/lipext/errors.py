"""Exception types shared across the package."""

from __future__ import annotations


class LipextError(Exception):
    """Base class for all package-specific errors."""


# -- geometry ---------------------------------------------------------------

class DegenerateSimplex(LipextError):
    """The given points do not span a nondegenerate simplex."""


class NotInAffineHull(LipextError):
    """The query point does not lie in the affine hull of the vertices."""


# -- kpoint -----------------------------------------------------------------

class QueryCoincidesWithSample(LipextError):
    """The query point coincides with one of the sample positions."""


class NoCertifiedSubset(LipextError):
    """Subset enumeration exhausted without a certified candidate.

    Signals numerical failure: a certified subset of size at most m+1 is
    guaranteed to exist for exact arithmetic.
    """


# -- graph ------------------------------------------------------------------

class UnknownVertex(LipextError):
    """Vertex id not present in the graph."""


class BoundaryVertex(LipextError):
    """Operation requires an interior vertex but got a boundary one."""


class BoundaryMismatch(LipextError):
    """Two vertex functions disagree on the boundary set."""


# -- solvers ----------------------------------------------------------------

class InvalidPath(LipextError):
    """A connecting path is inconsistent with the solver state."""


class MultipleAttachments(LipextError):
    """An unlabeled component attaches to more than one labeled vertex.

    Internal inconsistency: it would imply a connecting path still existed.
    """


class NotConverged(LipextError):
    """Iteration budget exhausted before the tolerance was met.

    Carries the partial result so callers can inspect or emit it.
    """

    def __init__(self, message: str, values=None, report=None):
        super().__init__(message)
        self.values = values
        self.report = report


# -- cli --------------------------------------------------------------------

class ParseError(LipextError):
    """Input file or argument could not be parsed."""


class ValidationError(LipextError):
    """Graph failed validation; message lists the violations."""


class MethodUnavailable(LipextError):
    """Requested solve method does not apply to this input."""


class DimensionMismatch(LipextError):
    """Value dimensions of two inputs do not align."""


class BadParams(LipextError):
    """Generator parameters out of range."""
