"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI:
  ConfigError            -> 1 (usage / configuration)
  NumericError           -> 2 (solver did not produce a usable number)
  GeometryError family   -> 3 (infeasible or degenerate geometry)
"""


class InfeigError(Exception):
    """Base class for all package errors."""


class ConfigError(InfeigError):
    """Malformed configuration, unknown keys, or bad CLI usage."""


class GridMismatchError(ConfigError):
    """A field file does not match the grid declared in the config."""


class GeometryError(InfeigError):
    """Infeasible or degenerate geometric input."""


class DegenerateDomainError(GeometryError):
    """Rasterization produced an empty interior."""


class NoPositiveRegionError(GeometryError):
    """The weight has no positive nodes where one is required."""


class NoNegativeRegionError(GeometryError):
    """The weight has no negative nodes where one is required."""


class InfeasiblePackingError(GeometryError):
    """Fewer candidate nodes than balls requested."""


class NumericError(InfeigError):
    """A numeric routine could not produce a result."""


class SeedMassError(NumericError):
    """Cannot seed positive mass: every admissible cone has nonpositive mass."""
