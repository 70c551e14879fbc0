"""Grassmannians of C^n: principal angles, the Grassmann graph, and recovery of
the unitary or anti-unitary operator behind a transformation of subspaces."""

from .errors import GrassmannError, ReconstructionFailed
from .graph import (
    CliqueDescriptor,
    GrassmannGraphView,
    OrthogonalApartment,
    build_graph,
    geodesic_between,
    geodesic_through_to_orthogonal,
    graph_distance,
    max_compatible_in_clique,
    orthogonal_apartment,
    star_family,
    top_family,
)
from .grassmann import (
    PrincipalDecomposition,
    RelationReport,
    Subspace,
    is_adjacent,
    is_compatible,
    is_ortho_adjacent,
    is_orthogonal,
    orthocomplement,
    principal_angles,
    random_subspace,
    relation_report,
    transition_probability,
)
from .operators import (
    Endo,
    SemilinearOperator,
    induced_map,
    normalize_to_isometry,
    projective_equal,
    random_antiunitary,
    random_unitary,
)
from .wigner import (
    TransformationOracle,
    check_preservation,
    descent_trace,
    extract_line_map,
    reconstruct_operator,
    wild_map_demo,
)

__version__ = "0.1.0"
