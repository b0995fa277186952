class ShapeletScopeError(Exception):
    """Base class for errors raised by shapelet_scope."""


class InvalidConfiguration(ShapeletScopeError, ValueError):
    """A parameter or configuration value is outside its valid range."""


class NoDominantPeak(ShapeletScopeError):
    """The radial spectrum has no sufficiently prominent peak (no pattern)."""


class CalibrationError(ShapeletScopeError):
    """The scale-response maximum is not interior to the searched range."""


class ImageFormatError(ShapeletScopeError):
    """An input image has an unsupported format or colour mode."""
