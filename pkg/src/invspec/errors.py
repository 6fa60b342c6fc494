"""Exception hierarchy shared across the package."""
from __future__ import annotations


class InvspecError(Exception):
    """Base class for all library-specific failures."""


class InputError(InvspecError):
    """Malformed or out-of-contract user input (files, index ranges)."""


class DegenerateDenominatorError(InvspecError):
    """A structurally nonzero denominator fell below tolerance.

    ``indices`` names the offending index tuple so callers can report it.
    """

    def __init__(self, message: str, indices: tuple = ()):
        super().__init__(message)
        self.indices = indices


class ResonantIndexError(DegenerateDenominatorError):
    """A recurrence left factor vanished at an index triple (n, alpha, j)."""


class PoleProximityError(DegenerateDenominatorError):
    """A series evaluation point is too close to a pole (n, j)."""


class SingularMatrixError(InvspecError):
    """Linear solve hit a negligible pivot; carries the pivot index."""

    def __init__(self, message: str, pivot_index: int = -1):
        super().__init__(message)
        self.pivot_index = pivot_index


class SingularSystemError(InvspecError):
    """The diagonal solve at some column is numerically singular."""

    def __init__(self, message: str, alpha: int = -1):
        super().__init__(message)
        self.alpha = alpha


class TruncationError(InvspecError):
    """A recurrence requested an entry beyond the stored truncation depth."""

    def __init__(self, message: str, needed_depth: int = -1):
        super().__init__(message)
        self.needed_depth = needed_depth


class DivisionRemainderError(InvspecError):
    """Exact linear-factor division left a remainder above tolerance."""


class ConvergenceError(InvspecError):
    """A truncated quantity failed its convergence criterion.

    ``flagged`` lists the evaluation points that did not converge.
    """

    def __init__(self, message: str, flagged: list | None = None):
        super().__init__(message)
        self.flagged = flagged or []


class VerificationError(InvspecError):
    """One or more verification checks failed; carries their names."""

    def __init__(self, message: str, failed: list | None = None):
        super().__init__(message)
        self.failed = failed or []
