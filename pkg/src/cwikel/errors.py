"""Exception types shared across the workbench."""


class CwikelError(Exception):
    """Base class for all workbench errors."""


class NonIntegrable(CwikelError):
    """No finite Luxemburg gauge exists for the given step function."""


class ZeroFunction(CwikelError):
    """Operation requires a function with positive norm."""


class ZeroSeminorm(CwikelError):
    """Test function collapses to a polynomial; the homogeneous seminorm vanishes."""


class NegativeWeight(CwikelError):
    """Weight function must be nonnegative."""


class NegativeFunction(CwikelError):
    """Input function must be nonnegative."""


class DegenerateCube(CwikelError):
    """Cube contains fewer grid cells than the polynomial basis dimension."""


class UnsupportedDimension(CwikelError):
    """Requested dimension is outside the implemented range."""


class AliasError(CwikelError):
    """Grid resolution too low for the requested Fourier band."""


class GridMismatch(CwikelError):
    """Two sampled functions live on incompatible grids."""


class OriginSingularity(CwikelError):
    """Inversion evaluation requested closer to the origin than one grid cell."""


class BoxTooSmall(CwikelError):
    """Box half-width cannot hold the requested construction."""


class ConfigError(CwikelError):
    """Experiment configuration is invalid."""


class IoError(CwikelError):
    """File input or output failed."""
