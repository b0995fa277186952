"""Steerable polar shapelet analysis of self-assembled surface pattern images."""

__version__ = "0.1.0"

from .exceptions import (  # noqa: F401
    CalibrationError,
    ImageFormatError,
    InvalidConfiguration,
    NoDominantPeak,
    ShapeletScopeError,
)
from .shapelets import (  # noqa: F401
    ShapeletIndex,
    ShapeletKernel,
    chi_radial_unnorm,
    eval_assoc_laguerre,
    render_kernel,
    steer_kernel,
)
from .scales import REFERENCE_COEFFICIENTS, beta_for, default_shapelet_set  # noqa: F401
from .spectral import RadialProfile, dominant_wavelength, estimate_wavelength, radial_average, spectral_density  # noqa: F401
from .patterns import GrainFieldSpec, PatternSpec, multi_grain_pattern, uniform_pattern  # noqa: F401
from .response import (  # noqa: F401
    DistanceField,
    ReferenceSet,
    ResponseVectorField,
    correlate,
    optimal_orientation,
    response_distance_map,
    response_vector_field,
)
from .calibration import ScaleCoefficient, ScaleCurve, calibrate_scale, scale_response_curve  # noqa: F401
