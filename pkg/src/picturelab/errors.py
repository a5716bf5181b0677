"""Exception hierarchy shared by all picturelab modules."""


class PictureLabError(Exception):
    """Base class for all library errors."""


class ShapeError(PictureLabError, ValueError):
    """Operands live on incompatible mode shapes."""


class DimensionError(PictureLabError, ValueError):
    """An occupation number or index falls outside its mode dimension."""


class ValidationError(PictureLabError, ValueError):
    """An input fails a mathematical validity check (hermiticity, POVM completeness, ...)."""


class ConfigurationError(PictureLabError, ValueError):
    """Parameters are mutually inconsistent (e.g. too few phase quadrature points)."""


class ResourceError(PictureLabError):
    """A requested object would exceed the configured size cap."""


class TruncationError(PictureLabError):
    """Truncation artifacts exceed tolerance; a larger cutoff is needed."""
