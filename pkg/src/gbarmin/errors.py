"""Exception types shared across the package."""


class GbarMinError(Exception):
    """Base class for gbarmin errors."""


class DimensionLimitError(GbarMinError):
    """An exact-enumeration request exceeds the configured size caps."""


class StationaryConvergenceError(GbarMinError):
    """Power iteration failed to reach a stationary distribution.

    Raised for reducible/periodic transition tables; deliberately distinct
    from :class:`DimensionLimitError` so callers can tell a degenerate chain
    apart from an oversized request.
    """
