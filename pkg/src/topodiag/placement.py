"""Minimum sensor placement as a hitting-set problem.

Detection of every single-link failure needs one sensor in each
``S_i = {j : dist(i, j) <= r_max - 1}`` for every node ``i`` with an in-edge.
Isolation of a failure set needs one sensor in each ``S_ij``, the union of such
balls around the ending nodes of ``E_i xor E_j`` in the graph after ``E_i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .netgraph import (
    INF,
    NetworkModel,
    apply_failure,
    bfs_distances,
    ending_nodes,
    failure_set,
    receiving_nodes,
)
from .structural import TransferIndex, _resolve_rmax, within_reach

GREEDY_ONLY = "greedy_only"
PROVED_OPTIMAL = "proved_optimal"


class InfeasiblePlacementError(ValueError):
    def __init__(self, label, message=None):
        self.label = label
        super().__init__(message or f"target {label} is empty: no sensor location can hit it")


@dataclass(frozen=True)
class HittingSetInstance:
    ground_set: tuple
    targets: tuple  # of frozenset
    labels: tuple = ()

    def __post_init__(self):
        ground = tuple(sorted(set(self.ground_set)))
        targets = tuple(frozenset(t) for t in self.targets)
        labels = tuple(self.labels) if self.labels else tuple(range(len(targets)))
        if len(labels) != len(targets):
            raise ValueError("one label per target required")
        gs = set(ground)
        for t, lab in zip(targets, labels):
            if not t:
                raise InfeasiblePlacementError(lab)
            if not t <= gs:
                raise ValueError(f"target {lab} = {sorted(t)} is not inside the ground set")
        object.__setattr__(self, "ground_set", ground)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "labels", labels)

    @property
    def q(self) -> int:
        return len(self.targets)

    def hits_all(self, sensors: Iterable[int]) -> bool:
        s = set(sensors)
        return all(t & s for t in self.targets)


@dataclass(frozen=True)
class PlacementResult:
    sensors: tuple
    covered: int
    optimal_flag: str
    bound: float


def approximation_bound(q: int) -> float:
    return 1.0 + math.log(q) if q > 0 else 1.0


def _ball(model: NetworkModel, source: int, r_max) -> set:
    return {v for v, d in bfs_distances(model, source).items() if within_reach(d, r_max)}


def _ground(model, ground_set):
    if ground_set is None:
        return tuple(model.nodes)
    ground = tuple(sorted(set(int(v) for v in ground_set)))
    for v in ground:
        model._check_node(v)
    return ground


def _checked_rmax(dyn, r_max) -> TransferIndex:
    rm = _resolve_rmax(dyn, r_max)
    if rm.value != INF and rm.value < 1:
        raise InfeasiblePlacementError("r_max", "r_max = 0: no sensor placement can detect any failure")
    return rm


def build_detect_instance(dyn, model: NetworkModel, ground_set=None, r_max=None) -> HittingSetInstance:
    rm = _checked_rmax(dyn, r_max)
    ground = _ground(model, ground_set)
    gs = set(ground)
    targets, labels = [], []
    for i in sorted(receiving_nodes(model)):
        t = frozenset(_ball(model, i, rm.value) & gs)
        if not t:
            raise InfeasiblePlacementError(i, f"no candidate sensor within reach of node {i}")
        targets.append(t)
        labels.append(i)
    return HittingSetInstance(ground, tuple(targets), tuple(labels))


def build_isolate_instance(dyn, model: NetworkModel, failures: Sequence, ground_set=None,
                           r_max=None) -> HittingSetInstance:
    rm = _checked_rmax(dyn, r_max)
    ground = _ground(model, ground_set)
    gs = set(ground)
    scenarios = (frozenset(),) + failure_set(model, failures)
    targets, labels = [], []
    for i in range(len(scenarios)):
        graph_i = apply_failure(model, scenarios[i])
        for j in range(i + 1, len(scenarios)):
            reach = set()
            for k in ending_nodes(scenarios[i] ^ scenarios[j]):
                reach |= _ball(graph_i, k, rm.value)
            t = frozenset(reach & gs)
            if not t:
                raise InfeasiblePlacementError(
                    (i, j), f"no sensor location can generically distinguish scenarios {i} and {j}")
            targets.append(t)
            labels.append((i, j))
    return HittingSetInstance(ground, tuple(targets), tuple(labels))


def greedy_hitting_set(instance: HittingSetInstance) -> PlacementResult:
    """Repeatedly add the node that hits the most still-unhit targets.

    Ties go to the smallest node index.
    """
    unhit = list(instance.targets)
    chosen = []
    while unhit:
        best, gain = None, 0
        for s in instance.ground_set:
            if s in chosen:
                continue
            g = sum(1 for t in unhit if s in t)
            if g > gain:
                best, gain = s, g
        if best is None:
            raise InfeasiblePlacementError("?", "remaining targets cannot be hit")
        chosen.append(best)
        unhit = [t for t in unhit if best not in t]
    return PlacementResult(tuple(sorted(chosen)), instance.q, GREEDY_ONLY, approximation_bound(instance.q))


def exact_hitting_set(instance: HittingSetInstance, size_limit=16) -> PlacementResult:
    """Exhaustive search by increasing cardinality, lexicographic within a size."""
    ground = instance.ground_set
    if len(ground) > size_limit:
        raise ValueError(f"ground set of {len(ground)} exceeds size limit {size_limit}")
    bit = {v: 1 << k for k, v in enumerate(ground)}
    masks = [sum(bit[v] for v in t) for t in instance.targets]
    for size in range(len(ground) + 1):
        for combo in combinations(range(len(ground)), size):
            m = 0
            for k in combo:
                m |= 1 << k
            if all(t & m for t in masks):
                return PlacementResult(tuple(ground[k] for k in combo), instance.q, PROVED_OPTIMAL,
                                       approximation_bound(instance.q))
    raise InfeasiblePlacementError("?", "no hitting set exists")
