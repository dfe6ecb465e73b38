"""Toolkit for sampling, comparing, reconstructing, and mapping elections."""

from .core import (
    Election,
    FrequencyMatrix,
    PositionMatrix,
    borda_scores,
    frequency_from_position,
    frequency_matrix,
    position_matrix,
    restrict_to_candidates,
)
from .metric import (
    DistanceRecord,
    distance_matrix,
    emd,
    normalization_constant,
    normalized,
    positionwise,
    positionwise_elections,
)
from .recovery import (
    election_from_frequency_matrix,
    election_from_position_matrix,
    round_position_matrix,
)
from .compass import (
    CompassMatrix,
    CompassNorms,
    PathSpec,
    closed_form_distance,
    compass_matrix,
    convex_combination,
    full_compass,
    normalized_limit,
    path_points,
)
from .cultures import (
    CultureSpec,
    MahonianTable,
    expected_swaps,
    mahonian_table,
    relative_expected_swaps,
    relphi_to_phi,
    sample,
    sample_conitzer,
    sample_hypercube,
    sample_ic,
    sample_mallows,
    sample_mallows_norm,
    sample_urn,
    sample_urn_gamma,
    sample_walsh,
)
from .embed import MapLayout, embed_distances, render_svg, write_coordinates

__version__ = "0.1.0"

__all__ = [
    "Election",
    "FrequencyMatrix",
    "PositionMatrix",
    "borda_scores",
    "frequency_from_position",
    "frequency_matrix",
    "position_matrix",
    "restrict_to_candidates",
    "DistanceRecord",
    "distance_matrix",
    "emd",
    "normalization_constant",
    "normalized",
    "positionwise",
    "positionwise_elections",
    "election_from_frequency_matrix",
    "election_from_position_matrix",
    "round_position_matrix",
    "CompassMatrix",
    "CompassNorms",
    "PathSpec",
    "closed_form_distance",
    "compass_matrix",
    "convex_combination",
    "full_compass",
    "normalized_limit",
    "path_points",
    "CultureSpec",
    "MahonianTable",
    "expected_swaps",
    "mahonian_table",
    "relative_expected_swaps",
    "relphi_to_phi",
    "sample",
    "sample_conitzer",
    "sample_hypercube",
    "sample_ic",
    "sample_mallows",
    "sample_mallows_norm",
    "sample_urn",
    "sample_urn_gamma",
    "sample_walsh",
    "MapLayout",
    "embed_distances",
    "render_svg",
    "write_coordinates",
    "__version__",
]
