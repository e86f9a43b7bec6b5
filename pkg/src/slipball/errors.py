"""Exception types shared across the package."""


class SlipballError(Exception):
    """Base class for all slipball errors."""


class PoleDegeneracy(SlipballError):
    """Local basis requested too close to the polar axis (theta near 0 or pi)."""


class CoordinateSingularity(SlipballError):
    """Operator evaluation at a point where 1/r or 1/sin(theta) blows up."""


class StencilOutOfDomain(SlipballError):
    """Finite-difference stencil would leave the admissible region."""


class NoWitness(SlipballError):
    """Witness-point scan found no boundary point above threshold."""


class DegenerateFit(SlipballError):
    """Scaling sweep has too few usable points for a slope fit."""


class ConfigError(SlipballError):
    """Invalid run configuration (bad key, bad value, unreadable file)."""
