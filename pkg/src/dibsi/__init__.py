"""Domain-informed B-spline interpolation (DIBSI).

Interpolation of uniformly sampled signals that live on an inhomogeneous
domain described by a set of subdomain functions.  The package provides
the shift-variant generating basis, the interpolation machinery, random
domain/signal synthesis for benchmarking, separable 2-D image upsampling,
and a command line front end.
"""

from dibsi.bsplines import bspline_eval, delta_neighborhood, half_support
from dibsi.domains import (
    GridFunction,
    MeyerSystem,
    SubdomainSet,
    is_homogeneous,
    load_domain,
    meyer_aux,
    random_warp,
    realize_domain,
    save_domain,
)
from dibsi.basis import (
    DomainInformedBasis,
    StandardBasis,
    coherence_factor,
    logistic_shape,
    riesz_bounds,
)
from dibsi.interpolation import (
    Interpolant,
    SampleSequence,
    SingularSystemError,
    SolverResidualError,
    assemble_collocation,
    interpolate,
    interpolate_bsi,
    interpolate_dibsi,
    solve_coefficients,
)
from dibsi.estimators import BSplineInterpolator, DomainInformedInterpolator
from dibsi.bench import (
    ErrorTable,
    SyntheticSignal,
    monte_carlo,
    realize_signal,
    relative_l2_error,
    sample_signal,
)
from dibsi.image import (
    ProbabilityAtlas,
    ScalarImage,
    extract_line_domain,
    load_atlas,
    load_image,
    save_atlas,
    save_image,
    upsample_separable,
)

__version__ = "0.1.0"

__all__ = [
    "BSplineInterpolator",
    "DomainInformedBasis",
    "DomainInformedInterpolator",
    "ErrorTable",
    "GridFunction",
    "Interpolant",
    "MeyerSystem",
    "ProbabilityAtlas",
    "SampleSequence",
    "ScalarImage",
    "SingularSystemError",
    "SolverResidualError",
    "StandardBasis",
    "SubdomainSet",
    "SyntheticSignal",
    "assemble_collocation",
    "bspline_eval",
    "coherence_factor",
    "delta_neighborhood",
    "extract_line_domain",
    "half_support",
    "interpolate",
    "interpolate_bsi",
    "interpolate_dibsi",
    "is_homogeneous",
    "load_atlas",
    "load_domain",
    "load_image",
    "logistic_shape",
    "meyer_aux",
    "monte_carlo",
    "random_warp",
    "realize_domain",
    "realize_signal",
    "relative_l2_error",
    "riesz_bounds",
    "sample_signal",
    "save_atlas",
    "save_domain",
    "save_image",
    "solve_coefficients",
    "upsample_separable",
]
