"""Exception hierarchy.  Everything derives from ``ValueError`` so callers
that only care about bad input can catch that."""


class ProjAnglesError(ValueError):
    pass


class DimensionMismatchError(ProjAnglesError):
    pass


class ZeroSubspaceError(ProjAnglesError):
    """An angle or distance was requested for the zero subspace."""


class IndeterminateError(ProjAnglesError):
    """Cross-ratio of the form 0/0."""


class ComplementarityError(ProjAnglesError):
    def __init__(self, message, min_singular_value=None):
        super().__init__(message)
        self.min_singular_value = min_singular_value


class NotAProjectionError(ProjAnglesError):
    pass


class TrivialProjectionError(ProjAnglesError):
    pass


class GeometryError(ProjAnglesError):
    """Plane sections do not have the required dimensions or are not distinct."""


class UnsupportedCaseError(ProjAnglesError):
    pass


class AbsentEigenvalueError(ProjAnglesError):
    pass


class InconsistentPairError(ProjAnglesError):
    """No consistency projection exists for the pair."""


class ConsistencyError(ProjAnglesError):
    """A supplied matrix is not an admissible consistency projection."""
