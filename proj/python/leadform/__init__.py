"""Leader-follower formation synthesis, C++ core."""

from ._leadform import (
    CommGraph,
    Error,
    LeaderMode,
    ProtocolRun,
    build_graph,
    char_poly_matchings,
    characteristic_polynomial,
    leader_eccentricity,
    offsets_from_formation,
    perfect_matching_count,
    polynomial_roots,
    run_protocol,
    settled,
    simulate,
    spectrum,
    structural_report,
    synthesize,
    topological_order,
    verify_formation,
)

__all__ = [
    "CommGraph",
    "Error",
    "LeaderMode",
    "ProtocolRun",
    "build_graph",
    "char_poly_matchings",
    "characteristic_polynomial",
    "leader_eccentricity",
    "offsets_from_formation",
    "perfect_matching_count",
    "polynomial_roots",
    "run_protocol",
    "settled",
    "simulate",
    "spectrum",
    "structural_report",
    "synthesize",
    "topological_order",
    "verify_formation",
]
