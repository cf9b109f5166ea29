"""Graph-theoretic generic verdicts.

A failure is generically detectable iff some sensor lies within
``r_max - 1`` hops of an ending node of the failed links, where ``r_max`` is
the largest power ``i`` with ``C [(lambda I - A)^{-1} H]^i`` not identically
zero. Isolability applies the same test to every pair of scenarios, with hop
distances measured in the graph left by the first scenario of the pair.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebraic import DEFAULT_TOL, MAX_RESOLVE, TRANSFER_SAMPLES, spectral_radius
from .netgraph import (
    INF,
    IdenticalScenariosError,
    NetworkModel,
    apply_failure,
    check_scenario,
    ending_nodes,
    shortest_path,
)
from .sysmodel import SubsystemDynamics

log = logging.getLogger(__name__)

CAP_RULE = "cap_rule"
ZERO_OUTPUT = "zero_output"


@dataclass(frozen=True)
class TransferIndex:
    value: object  # int or math.inf
    certified_by: str

    @property
    def infinite(self) -> bool:
        return self.value == INF

    def __str__(self):
        return "infinite" if self.infinite else str(self.value)


@dataclass(frozen=True)
class StructuralVerdict:
    holds: bool
    kind: str  # "detect" or "isolate"
    distance: object  # d_min or d^E_min
    r_max: TransferIndex
    witness_path: tuple | None = None
    failing_pair: tuple | None = None
    pair_distances: dict = field(default_factory=dict)
    route: str = "pairwise"

    def __bool__(self):
        return self.holds

    @property
    def label(self) -> str:
        if self.kind == "detect":
            return "GenericallyDetectable" if self.holds else "GenericallyUndetectable"
        return "GenericallyIsolable" if self.holds else "GenericallyNotIsolable"


@dataclass(frozen=True)
class SubsetWitness:
    pair: tuple
    difference: frozenset
    distance: object


def within_reach(distance, r_max) -> bool:
    """``distance <= r_max - 1``, false whenever the distance is infinite."""
    if distance == INF:
        return False
    return distance <= r_max - 1


def transfer_index(dyn: SubsystemDynamics, tol=DEFAULT_TOL, seed=0, cap=None,
                   samples=TRANSFER_SAMPLES) -> TransferIndex:
    """Largest ``i`` with ``C H_s^i != 0``; infinite when ``C H_s^cap != 0``.

    ``cap`` defaults to ``n``: left kernels of powers of an ``n x n`` operator
    stop growing after ``n`` steps, so surviving ``n`` products means surviving
    all of them. ``C H_s^i`` counts as identically zero when it vanishes, relative
    to ``||C H_s^(i-1)|| ||H_s||``, at every sampled ``lambda``.
    """
    n = dyn.n
    cap = n if cap is None else int(cap)
    if not np.any(dyn.C):
        warnings.warn("output matrix C is identically zero; no failure can ever be seen", RuntimeWarning)
        return TransferIndex(0, ZERO_OUTPUT)
    rng = np.random.default_rng(seed)
    radius = 2.0 * spectral_radius(dyn.A) + 1.0
    # first vanishing exponent per sample; cap + 1 means never vanished
    first_zero = []
    for _ in range(samples):
        for _attempt in range(MAX_RESOLVE + 1):
            lam = radius * (1.0 + rng.random()) * np.exp(2j * np.pi * rng.random())
            try:
                Hs = np.linalg.solve(lam * np.eye(n) - dyn.A, dyn.H)
                break
            except np.linalg.LinAlgError:
                continue
        else:
            raise np.linalg.LinAlgError("could not evaluate (lambda I - A)^{-1} H")
        hs_norm = np.linalg.norm(Hs, 2)
        M = dyn.C / np.linalg.norm(dyn.C, 2)
        vanished = cap + 1
        for i in range(1, cap + 1):
            M = M @ Hs
            nrm = np.linalg.norm(M, 2)
            if hs_norm == 0 or nrm <= tol * hs_norm:
                vanished = i
                break
            M = M / nrm
        first_zero.append(vanished)
    # a rational matrix is zero only if it vanishes at every sample
    k = max(first_zero)
    if k > cap:
        return TransferIndex(INF, CAP_RULE)
    return TransferIndex(k - 1, ZERO_OUTPUT)


def _resolve_rmax(dyn, r_max):
    if r_max is None:
        return transfer_index(dyn)
    if isinstance(r_max, TransferIndex):
        return r_max
    return TransferIndex(r_max, CAP_RULE if r_max == INF else ZERO_OUTPUT)


def distance_index(model: NetworkModel, failure):
    """``d_min``: hop distance from the failure's ending nodes to the sensors in
    the faultless graph."""
    model.require_sensors()
    failure = check_scenario(model, failure)
    path = shortest_path(model, ending_nodes(failure), model.sensors)
    return INF if path is None else len(path) - 1


def generically_detectable(dyn, model: NetworkModel, failure, r_max=None) -> StructuralVerdict:
    model.require_sensors()
    failure = check_scenario(model, failure)
    rm = _resolve_rmax(dyn, r_max)
    path = shortest_path(model, ending_nodes(failure), model.sensors)
    d = INF if path is None else len(path) - 1
    holds = within_reach(d, rm.value)
    return StructuralVerdict(holds, "detect", d, rm, witness_path=path if holds else None, route="distance")


def pair_distance(model: NetworkModel, e_i, e_j):
    """``d_ij``: distance from the ending nodes of ``E_i xor E_j`` to the sensors,
    measured in the graph after failure ``E_i``."""
    model.require_sensors()
    e_i = check_scenario(model, e_i, allow_empty=True)
    e_j = check_scenario(model, e_j, allow_empty=True)
    diff = e_i ^ e_j
    if not diff:
        raise IdenticalScenariosError(e_i, e_j)
    graph_i = apply_failure(model, e_i)
    path = shortest_path(graph_i, ending_nodes(diff), model.sensors)
    return INF if path is None else len(path) - 1


def _scenarios(model, failures):
    scenarios = tuple(check_scenario(model, s) for s in failures)
    if not scenarios:
        raise ValueError("failure set is empty")
    return (frozenset(),) + scenarios


def generically_isolable(dyn, model: NetworkModel, failures: Sequence, r_max=None) -> StructuralVerdict:
    """Compare ``max_{i<j} d_ij`` with ``r_max - 1`` over ``[{}, E_1, ..., E_r]``.

    ``failing_pair`` names the lexicographically first pair violating the bound.
    Duplicate scenarios give an immediate negative verdict.
    """
    model.require_sensors()
    rm = _resolve_rmax(dyn, r_max)
    scenarios = _scenarios(model, failures)
    dists = {}
    failing = None
    worst = 0
    for i in range(len(scenarios)):
        for j in range(i + 1, len(scenarios)):
            if scenarios[i] == scenarios[j]:
                return StructuralVerdict(False, "isolate", INF, rm, failing_pair=(i, j),
                                         pair_distances={(i, j): INF})
            d = pair_distance(model, scenarios[i], scenarios[j])
            dists[(i, j)] = d
            worst = max(worst, d)
            if failing is None and not within_reach(d, rm.value):
                failing = (i, j)
    return StructuralVerdict(failing is None, "isolate", worst, rm, failing_pair=failing,
                             pair_distances=dists)


def disjoint_isolability_shortcut(dyn, model: NetworkModel, failures: Sequence, r_max=None):
    """For pairwise edge-disjoint failure sets, isolability reduces to detectability
    of every member. Returns ``None`` when some two scenarios overlap."""
    model.require_sensors()
    scenarios = _scenarios(model, failures)[1:]
    for i in range(len(scenarios)):
        for j in range(i + 1, len(scenarios)):
            if scenarios[i] & scenarios[j]:
                return None
    rm = _resolve_rmax(dyn, r_max)
    failing = None
    worst = 0
    for k, s in enumerate(scenarios, start=1):
        v = generically_detectable(dyn, model, s, rm)
        worst = max(worst, v.distance)
        if failing is None and not v.holds:
            failing = (0, k)
    return StructuralVerdict(failing is None, "isolate", worst, rm, failing_pair=failing, route="disjoint")


def subset_nonisolability_screen(dyn, model: NetworkModel, failures: Sequence, r_max=None):
    """First pair with one scenario nested in the other and an undetectable
    difference, or ``None``.

    The difference is judged from the larger scenario's post-failure graph,
    i.e. through ``d_ij`` with ``E_j`` contained in ``E_i``.
    """
    model.require_sensors()
    rm = _resolve_rmax(dyn, r_max)
    scenarios = _scenarios(model, failures)
    for i in range(len(scenarios)):
        for j in range(i + 1, len(scenarios)):
            a, b = scenarios[i], scenarios[j]
            if a == b:
                return SubsetWitness((i, j), frozenset(), INF)
            if b <= a:
                big = a
            elif a <= b:
                big = b
            else:
                continue
            d = pair_distance(model, big, a if big is b else b)
            if not within_reach(d, rm.value):
                return SubsetWitness((i, j), a ^ b, d)
    return None
