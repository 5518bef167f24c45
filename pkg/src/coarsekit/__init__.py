"""coarsekit: finite-window computations in coarse geometry.

Spaces with exact integer metrics, scale-r components, colored covers
witnessing asymptotic-dimension bounds, amenability and paradoxicality
certificates, and finite-propagation operators with verifiable algebraic
relations.
"""

from .amenability import (
    FolnerBudget,
    FolnerCertificate,
    MatchingOutcome,
    ParadoxicalDecomposition,
    PartialTranslation,
    WindowedDoubling,
    folner_search,
    folner_search_report,
    growth_profile,
    isoperimetric_profile,
    matching_certificate,
    paradox_free_group,
    paradox_from_pairs,
    transport_paradox,
    verify_doubling,
    verify_folner,
    verify_paradox,
)
from .components import (
    ScalePartition,
    SegmentFamily,
    class_size_profile,
    components_at_scale,
    extract_segments,
    verify_segments,
)
from .covers import (
    ColoredCover,
    greedy_cover,
    verify_decomposition,
    witness_grid2,
    witness_line,
    witness_tree,
)
from .maps import (
    CoarseMap,
    classify,
    compose,
    expansion_envelopes,
    injectivity_net,
    net_extract,
)
from .operators import (
    AFApproximation,
    BandedOperator,
    BlockColoring,
    OmegaDecomposition,
    af_approximate,
    build_uf,
    cancellation_witness,
    char_projection,
    from_partial_translation,
    identity_operator,
    interior_unitarity,
    make_operator,
    mv_split,
    omega_membership,
    op_norm,
    op_norm_detailed,
    quasi_check,
    rebuild_from_coloring,
    segment_shift,
    verify_properly_infinite,
    zero_operator,
)
from .spaces import (
    Space,
    Window,
    ball,
    bounded_geometry_profile,
    dist,
    make_space,
    scale_pairs,
    verify_metric,
    window_diameter,
    window_from_json,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
