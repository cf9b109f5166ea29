"""Interconnection topology: directed graph, hop distances and failure algebra.

Nodes are 1-based to match the usual numbering of networked-system examples.
An edge ``(i, j)`` always means a directed link *from* ``i`` *to* ``j``.
Distances are unweighted hop counts; ``math.inf`` stands for "no path".
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

Edge = tuple[int, int]
Scenario = frozenset  # frozenset[Edge]; the empty scenario is the faultless system

FREE = "free"
INF = math.inf


class ModelError(ValueError):
    """Malformed network model, failure or query."""


class DegenerateFailureError(ModelError):
    """A failure that removes no edge at all."""


class IdenticalScenariosError(ModelError):
    """Two failure scenarios with the same edge set; never distinguishable."""

    def __init__(self, e_i, e_j, pair=None):
        self.pair = pair
        msg = f"scenarios {sorted(e_i)} and {sorted(e_j)} are identical"
        if pair is not None:
            msg = f"pair {pair}: " + msg
        super().__init__(msg)


@dataclass(frozen=True)
class NetworkModel:
    """Directed topology with a weight pattern and a sensor set.

    ``weights`` maps each edge to either :data:`FREE` or a fixed nonzero float.
    Edges absent from ``weights`` are free.
    """

    node_count: int
    edges: tuple[Edge, ...]
    weights: Mapping[Edge, object] = field(default_factory=dict)
    sensors: frozenset = frozenset()

    def __post_init__(self):
        if int(self.node_count) < 1:
            raise ModelError(f"node_count must be positive, got {self.node_count}")
        edges = tuple((int(a), int(b)) for a, b in self.edges)
        if len(set(edges)) != len(edges):
            raise ModelError("duplicate edge in model")
        for a, b in edges:
            self._check_node(a)
            self._check_node(b)
        weights = {}
        for e, w in dict(self.weights).items():
            e = (int(e[0]), int(e[1]))
            if e not in edges:
                raise ModelError(f"weight given for non-existent edge {e}")
            if w != FREE:
                w = float(w)
                if w == 0.0:
                    raise ModelError(f"fixed weight of edge {e} is zero; drop the edge instead")
            weights[e] = w
        for e in edges:
            weights.setdefault(e, FREE)
        sensors = frozenset(int(s) for s in self.sensors)
        for s in sensors:
            self._check_node(s)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "sensors", sensors)

    def _check_node(self, v):
        if not 1 <= v <= self.node_count:
            raise ModelError(f"node {v} out of range 1..{self.node_count}")

    @property
    def nodes(self) -> range:
        return range(1, self.node_count + 1)

    @property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    def successors(self) -> dict[int, list[int]]:
        succ = {v: [] for v in self.nodes}
        for a, b in self.edges:
            succ[a].append(b)
        for v in succ:
            succ[v].sort()
        return succ

    def with_sensors(self, sensors: Iterable[int]) -> "NetworkModel":
        return NetworkModel(self.node_count, self.edges, self.weights, frozenset(sensors))

    def require_sensors(self):
        if not self.sensors:
            raise ModelError("sensor set is empty")


def bfs_distances(model: NetworkModel, source: int) -> dict[int, int]:
    """Hop distances from ``source`` to every reachable node (source at 0)."""
    model._check_node(source)
    succ = model.successors()
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in succ[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def shortest_distance(model: NetworkModel, source: int, target: int):
    """Minimum number of edges on a directed path, ``INF`` when unreachable."""
    model._check_node(target)
    return bfs_distances(model, source).get(target, INF)


def shortest_path(model: NetworkModel, sources: Iterable[int], targets: Iterable[int]):
    """A shortest node path from any of ``sources`` to any of ``targets``.

    Multi-source BFS; sources and targets are visited in ascending order so
    the path returned is deterministic. Returns ``None`` when no path exists.
    """
    sources = sorted(set(sources))
    targets = set(targets)
    succ = model.successors()
    parent = {s: None for s in sources}
    queue = deque(sources)
    while queue:
        v = queue.popleft()
        if v in targets:
            path = [v]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return tuple(reversed(path))
        for w in succ[v]:
            if w not in parent:
                parent[w] = v
                queue.append(w)
    return None


def set_distance(model: NetworkModel, sources: Iterable[int], targets: Iterable[int]):
    path = shortest_path(model, sources, targets)
    return INF if path is None else len(path) - 1


def check_scenario(model: NetworkModel, edges: Iterable[Edge], allow_empty=False) -> frozenset:
    scenario = frozenset((int(a), int(b)) for a, b in edges)
    if not scenario and not allow_empty:
        raise DegenerateFailureError("failure scenario removes no edge")
    missing = scenario - model.edge_set
    if missing:
        raise ModelError(f"failure references non-existent edges {sorted(missing)}")
    return scenario


def failure_set(model: NetworkModel, scenarios: Sequence[Iterable[Edge]]) -> tuple[frozenset, ...]:
    """Validate an ordered failure set: r >= 1, non-empty and pairwise distinct."""
    checked = tuple(check_scenario(model, s) for s in scenarios)
    if not checked:
        raise ModelError("failure set is empty")
    for i, a in enumerate(checked):
        for j in range(i + 1, len(checked)):
            if a == checked[j]:
                raise IdenticalScenariosError(a, checked[j], pair=(i + 1, j + 1))
    return checked


def apply_failure(model: NetworkModel, failure: Iterable[Edge]) -> NetworkModel:
    """The model with the failed edges (and their weights) removed."""
    removed = check_scenario(model, failure, allow_empty=True)
    edges = tuple(e for e in model.edges if e not in removed)
    weights = {e: model.weights[e] for e in edges}
    return NetworkModel(model.node_count, edges, weights, model.sensors)


def node_failure_to_links(model: NetworkModel, failed_nodes: Iterable[int]) -> frozenset:
    failed = set(int(v) for v in failed_nodes)
    for v in failed:
        model._check_node(v)
    scenario = frozenset(e for e in model.edges if e[0] in failed or e[1] in failed)
    if not scenario:
        raise DegenerateFailureError(f"nodes {sorted(failed)} have no adjacent edge")
    return scenario


def ending_nodes(failure: Iterable[Edge]) -> frozenset:
    return frozenset(b for _, b in failure)


def scenario_difference(e_i: Iterable[Edge], e_j: Iterable[Edge]) -> frozenset:
    """Symmetric difference of two scenarios; raises if they coincide."""
    e_i, e_j = frozenset(e_i), frozenset(e_j)
    diff = e_i ^ e_j
    if not diff:
        raise IdenticalScenariosError(e_i, e_j)
    return diff


def receiving_nodes(model: NetworkModel) -> frozenset:
    return frozenset(b for _, b in model.edges)
