"""Angles between subspaces, oblique projections and alternating iterations."""
from .errors import *  # noqa: F401,F403
from .oppenheim import (
    ABS_SUM,
    EUCLIDEAN,
    MIXED,
    AlternatingLimits,
    ConsistencyCheck,
    ConsistencyFamily,
    InfimumResult,
    NormSpec,
    alternating_limits,
    check_consistency_projection,
    consistency_family,
    is_norm_one,
    operator_norm,
    oppenheim_cos_given,
    oppenheim_cos_inf,
)
from .projections import (
    IterationReport,
    ObliqueProjection,
    direct_sum,
    eigen_plane,
    essential_spectral_radius,
    invariant_plane_eigenvalue,
    iterate_product,
    make_projection,
    mixed_case_eigenvalue,
    nontrivial_eigenvalue_3d,
    nonzero_eigenvalue_2d,
    predict_radius,
    projection_from_matrix,
    signed_nontrivial_eigenvalue_3d,
    spectral_radius_formula_2d,
    spectral_radius_numeric,
)
from .projective import (
    INFINITY,
    ProjectivePoint,
    cross_ratio,
    cross_ratio_from_inner_products,
    plane_coordinates,
)
from .subspaces import (
    Subspace,
    direct_sum_embed,
    directed_distance,
    friedrichs_cosine,
    from_columns,
    intersect,
    orthogonal_complement,
    orthonormalize,
    principal_angles,
    same_subspace,
    sine_between,
    subspace_sum,
)

__version__ = "0.1.0"
