"""Exception types shared across the package.

Every failure mode that callers are expected to handle gets its own class;
anything else is a plain assertion (bugs should fail loudly).
"""
from __future__ import annotations


class GeoeccError(Exception):
    """Base class for all package-specific errors."""


class DuplicateSites(GeoeccError):
    """Two sites share the exact same position."""

    def __init__(self, id_a: int, id_b: int):
        self.id_a = id_a
        self.id_b = id_b
        super().__init__(f"sites {id_a} and {id_b} have identical positions")


class SiteOutsideBox(GeoeccError):
    """A site lies on or outside the bounding box."""

    def __init__(self, site_id: int):
        self.site_id = site_id
        super().__init__(f"site {site_id} is not strictly inside the bounding box")


class OutsideBox(GeoeccError):
    """A query point lies outside the bounding box."""


class Disconnected(GeoeccError):
    """The communication graph is not connected."""


class ConnectivityExhausted(GeoeccError):
    """Network generation gave up after too many disconnected draws."""

    def __init__(self, attempts: int):
        self.attempts = attempts
        super().__init__(f"no connected instance after {attempts} attempts")


class ParseError(GeoeccError):
    """A text input (network file, campaign config) is malformed.

    Raised either as ParseError(line_no, message) when a specific line
    is at fault, or as ParseError(message) for document-level problems.
    """

    def __init__(self, line_no, message: str | None = None):
        if message is None:
            self.line_no = None
            super().__init__(str(line_no))
        else:
            self.line_no = line_no
            super().__init__(f"line {line_no}: {message}")


class GeocastViolation(GeoeccError):
    """No nearest node of a zone point is the owner or one of its H-neighbors."""


class HandoverStuck(GeoeccError):
    """A zone exit crosses a forbidden boundary, or no H-neighbor covers it."""


class PerimeterLoop(GeoeccError):
    """The boundary walk returned to its start without improving on d_o."""


class ProbeLost(GeoeccError):
    """A face probe failed to return to its starting edge."""


class PreconditionViolated(GeoeccError):
    """An operation was called outside its stated domain."""
