from .constructible import (
    Split,
    SpecialTreeError,
    TreeDecoration,
    is_2_constructible,
    replay_build_order,
    special_spanning_tree,
)
from .core import (
    Edge,
    GraphError,
    Multigraph,
    degeneracy,
    gen_complete,
    gen_cycle,
    gen_prism,
    gen_theta,
    multiply_edges,
    subdivide,
)
from .cuts import (
    CubicExpansion,
    CyclePartition,
    ExpansionError,
    bridges,
    components,
    cubic_expansion,
    cycle_equivalence,
    cyclicity,
    edge_connectivity_class,
    is_connected,
    is_strongly_connected,
    strongly_connected_orientation,
    two_edge_cuts,
)
from .embedding import (
    EmbeddingError,
    RotationSystem,
    cycle_rotation,
    euler_genus_zero,
    find_planar_rotation,
    planar_dual,
    planar_dual_with_rotation,
    rotation_from_neighbor_orders,
    theta_nested_rotation,
    trace_faces,
)
from .normalize import Normalized, normalize_to_subdivision
