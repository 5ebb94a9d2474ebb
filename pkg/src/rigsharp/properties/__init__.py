"""Decision procedures for increasing graph properties."""
from .connectivity import (
    articulation_points,
    components,
    is_connected,
    is_k_connected,
    is_k_connected_flow,
    min_degree_at_least,
)
from .hamilton import (
    HamiltonBudget,
    HamiltonVerdict,
    exact_hamilton_verdict,
    hamilton_solve,
    is_hamilton_cycle,
)
from .matching import has_perfect_matching, maximum_matching

__all__ = [
    "HamiltonBudget",
    "HamiltonVerdict",
    "articulation_points",
    "components",
    "exact_hamilton_verdict",
    "hamilton_solve",
    "has_perfect_matching",
    "is_connected",
    "is_hamilton_cycle",
    "is_k_connected",
    "is_k_connected_flow",
    "maximum_matching",
    "min_degree_at_least",
]
