"""Generic detectability and isolability of topology failures in networked linear systems."""
from .algebraic import (
    generic_detectable_mc,
    generic_isolable_mc,
    is_detectable,
    is_distinguishable,
    is_isolable,
    transfer_check,
    unobservable_subspace,
    witness_initial_state,
)
from .netgraph import FREE, INF, NetworkModel, apply_failure, node_failure_to_links, shortest_distance
from .placement import build_detect_instance, build_isolate_instance, exact_hitting_set, greedy_hitting_set
from .structural import (
    distance_index,
    generically_detectable,
    generically_isolable,
    pair_distance,
    transfer_index,
)
from .sysmodel import SubsystemDynamics, assemble_lumped, sample_weights

__version__ = "0.1.0"

__all__ = [
    "apply_failure",
    "assemble_lumped",
    "build_detect_instance",
    "build_isolate_instance",
    "distance_index",
    "exact_hitting_set",
    "FREE",
    "generic_detectable_mc",
    "generic_isolable_mc",
    "generically_detectable",
    "generically_isolable",
    "greedy_hitting_set",
    "INF",
    "is_detectable",
    "is_distinguishable",
    "is_isolable",
    "NetworkModel",
    "node_failure_to_links",
    "pair_distance",
    "sample_weights",
    "shortest_distance",
    "SubsystemDynamics",
    "transfer_check",
    "transfer_index",
    "unobservable_subspace",
    "witness_initial_state",
]
