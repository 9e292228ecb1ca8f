"""Exception types shared across the package."""


class VortexLabError(Exception):
    """Base class for all package errors."""


class ConfigError(VortexLabError, ValueError):
    """Invalid configuration document; the message names the offending field."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class SpecConsistencyError(VortexLabError, ValueError):
    """Sampled initial data violates a declared hypothesis of the data spec."""


class CoincidentPointError(VortexLabError, ValueError):
    """Unregularized kernel evaluated at a coincident source/target pair."""


class CollisionError(VortexLabError, RuntimeError):
    """Point vortices closer than the configured floor during integration."""

    def __init__(self, pair, time, distance):
        super().__init__(
            f"vortices {pair[0]} and {pair[1]} at distance {distance:.6g} "
            f"below the collision floor at t={time:.6g}"
        )
        self.pair = pair
        self.time = time
        self.distance = distance


class MassMismatchError(VortexLabError, ValueError):
    """Total masses of two measures differ beyond tolerance."""


class NegativeMassError(VortexLabError, ValueError):
    """A measure required to be nonnegative carries negative atoms."""


class MixedSignError(VortexLabError, ValueError):
    """A component required to be sign-definite carries both signs."""


class ZeroIntensityError(VortexLabError, ZeroDivisionError):
    """Normalization by a vanishing component intensity."""


class DegenerateInputError(VortexLabError, ValueError):
    """Not enough data for the requested operation (e.g. a one-point fit)."""
