"""Discrete and continuous Menger-type curvatures, Jones beta numbers and
flatness functionals on weighted point clouds, with the multiresolution and
multiscale-sequence machinery needed to test the inequalities relating them.
"""

from .estimators import (
    MCEstimate,
    ScaleClass,
    classify_scale,
    concentration_fraction,
    concentration_set_member,
    continuous_curvature_sq,
    curvature_over_Ulambda,
    decomposition_check,
    handle_indices,
    prop11_ratio,
)
from .geometry import (
    affine_hull_distance,
    diameter,
    direct_menger,
    discrete_curvature,
    discrete_curvature_sq,
    elevation_sine,
    gram_content,
    height,
    is_nondegenerate,
    max_at0,
    menger_curvature,
    min_at0,
    min_height,
    min_separation,
    polar_sine,
    remove_coordinate,
    replace_coordinate,
    scale_at0,
)
from .measure import (
    Ball,
    RegularityReport,
    WeightedPointCloud,
    ball_mass,
    gen_four_corner_cantor,
    gen_lipschitz_graph,
    gen_plane_patch,
    gen_sphere,
    points_in_ball,
    regularity_constant,
    sample_tuple,
)
from .multiscale import (
    MultiresolutionFamily,
    NetLevel,
    build_ball_family,
    build_net,
    build_partition,
    jones_flatness_continuous,
    jones_flatness_discrete,
    local_family,
    m_of_Q,
)
from .planes import AffinePlane, Beta2Result, beta2, beta2_with_plane, fit_plane
from .sequences import (
    Constants,
    PieceSamplingError,
    annulus_conditional_mass,
    augmented_size,
    auxiliary_sequence,
    bar_index,
    check_rake_property,
    check_well_scaled_bounds,
    constants,
    is_in_augmented_set,
    is_in_overline_set,
    multiscale_inequality_check,
    rake_inequality_check,
    rake_sequence,
    rake_tree,
    sample_well_scaled_piece,
    well_scaled_sequence,
)
from .verify import run_all, run_suite

__all__ = [
    "AffinePlane",
    "Ball",
    "Beta2Result",
    "Constants",
    "MCEstimate",
    "MultiresolutionFamily",
    "NetLevel",
    "PieceSamplingError",
    "RegularityReport",
    "ScaleClass",
    "WeightedPointCloud",
    "affine_hull_distance",
    "annulus_conditional_mass",
    "augmented_size",
    "auxiliary_sequence",
    "ball_mass",
    "bar_index",
    "beta2",
    "beta2_with_plane",
    "build_ball_family",
    "build_net",
    "build_partition",
    "check_rake_property",
    "check_well_scaled_bounds",
    "classify_scale",
    "concentration_fraction",
    "concentration_set_member",
    "constants",
    "continuous_curvature_sq",
    "curvature_over_Ulambda",
    "decomposition_check",
    "diameter",
    "direct_menger",
    "discrete_curvature",
    "discrete_curvature_sq",
    "elevation_sine",
    "fit_plane",
    "gen_four_corner_cantor",
    "gen_lipschitz_graph",
    "gen_plane_patch",
    "gen_sphere",
    "gram_content",
    "handle_indices",
    "height",
    "is_in_augmented_set",
    "is_in_overline_set",
    "is_nondegenerate",
    "jones_flatness_continuous",
    "jones_flatness_discrete",
    "local_family",
    "m_of_Q",
    "max_at0",
    "menger_curvature",
    "min_at0",
    "min_height",
    "min_separation",
    "multiscale_inequality_check",
    "points_in_ball",
    "polar_sine",
    "prop11_ratio",
    "rake_inequality_check",
    "rake_sequence",
    "rake_tree",
    "regularity_constant",
    "remove_coordinate",
    "replace_coordinate",
    "run_all",
    "run_suite",
    "sample_tuple",
    "sample_well_scaled_piece",
    "scale_at0",
    "well_scaled_sequence",
]
