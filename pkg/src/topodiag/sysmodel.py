"""Subsystem dynamics and Kronecker assembly of the lumped network model.

Every node runs the same linear subsystem ``x_i' = A x_i + B sum_j w_ij Gamma x_j``
with outputs ``y_i = C x_i``. Stacking all nodes gives

    Phi = I_N (x) A + W (x) H,    Q = S (x) C,    H = B Gamma,

where ``W[i, j]`` carries the weight of edge ``(j, i)`` (0-based array indices,
1-based node labels) and ``S`` selects the sensor nodes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .netgraph import FREE, ModelError, NetworkModel, check_scenario

SAMPLED_FREE = 1
FIXED_FROM_PATTERN = 2
ZERO = 0

WEIGHT_LOW = 0.1
WEIGHT_HIGH = 2.0


def _as_matrix(x, name):
    m = np.atleast_2d(np.asarray(x, dtype=float))
    if m.ndim != 2:
        raise ModelError(f"{name} must be a 2-D matrix")
    return m


@dataclass(frozen=True)
class SubsystemDynamics:
    A: np.ndarray
    B: np.ndarray
    Gamma: np.ndarray
    C: np.ndarray
    H: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        A = _as_matrix(self.A, "A")
        B = _as_matrix(self.B, "B")
        G = _as_matrix(self.Gamma, "Gamma")
        C = _as_matrix(self.C, "C")
        n = A.shape[0]
        if A.shape != (n, n) or n < 1:
            raise ModelError(f"A must be square, got {A.shape}")
        m = B.shape[1]
        if B.shape[0] != n or m < 1:
            raise ModelError(f"B must be {n}x m, got {B.shape}")
        if G.shape != (m, n):
            raise ModelError(f"Gamma must be {m}x{n}, got {G.shape}")
        if C.shape[1] != n or C.shape[0] < 1:
            raise ModelError(f"C must be p x {n}, got {C.shape}")
        for name, mat in (("A", A), ("B", B), ("Gamma", G), ("C", C)):
            if not np.all(np.isfinite(mat)):
                raise ModelError(f"{name} has non-finite entries")
            mat.setflags(write=False)
            object.__setattr__(self, name, mat)
        H = B @ G
        H.setflags(write=False)
        object.__setattr__(self, "H", H)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.C.shape[0]


@dataclass(frozen=True)
class WeightRealization:
    """Numeric adjacency matrix; ``W[i-1, j-1]`` is the weight of edge ``(j, i)``."""

    W: np.ndarray
    provenance: np.ndarray

    @property
    def N(self) -> int:
        return self.W.shape[0]

    def without(self, failure: Iterable) -> "WeightRealization":
        """Realization of the post-failure topology: failed entries zeroed."""
        W = self.W.copy()
        prov = self.provenance.copy()
        for a, b in failure:
            W[b - 1, a - 1] = 0.0
            prov[b - 1, a - 1] = ZERO
        return WeightRealization(W, prov)

    def scaled_free(self, factor: float) -> "WeightRealization":
        W = self.W.copy()
        mask = self.provenance == SAMPLED_FREE
        W[mask] *= factor
        return WeightRealization(W, self.provenance.copy())


@dataclass(frozen=True)
class LumpedRealization:
    Phi: np.ndarray
    Q: np.ndarray
    dims: tuple  # (N, n, m, p, |S|)
    sensors: tuple = ()

    @property
    def n_x(self) -> int:
        return self.Phi.shape[0]

    @property
    def n_y(self) -> int:
        return self.Q.shape[0]


def realization_from_matrix(model: NetworkModel, W) -> WeightRealization:
    """Wrap an explicit weight matrix, checking it respects the model pattern."""
    W = np.array(W, dtype=float)
    N = model.node_count
    if W.shape != (N, N):
        raise ModelError(f"weight matrix must be {N}x{N}, got {W.shape}")
    prov = np.full((N, N), ZERO, dtype=np.int8)
    allowed = np.zeros((N, N), dtype=bool)
    for a, b in model.edges:
        allowed[b - 1, a - 1] = True
        prov[b - 1, a - 1] = FIXED_FROM_PATTERN if model.weights[(a, b)] != FREE else SAMPLED_FREE
    if np.any(W[~allowed] != 0):
        raise ModelError("weight matrix has nonzero entries outside the edge pattern")
    prov[allowed & (W == 0)] = ZERO
    return WeightRealization(W, prov)


def sample_weights(model: NetworkModel, seed) -> WeightRealization:
    """Fixed edges keep their values; free edges get uniform draws from
    ``[-2, -0.1] U [0.1, 2]``, in edge order, deterministically per seed."""
    rng = np.random.default_rng(seed)
    N = model.node_count
    W = np.zeros((N, N))
    prov = np.full((N, N), ZERO, dtype=np.int8)
    for a, b in model.edges:
        w = model.weights[(a, b)]
        if w == FREE:
            # both halves have equal length, so sign x magnitude is uniform on the union
            mag = rng.uniform(WEIGHT_LOW, WEIGHT_HIGH)
            sign = 1.0 if rng.random() < 0.5 else -1.0
            W[b - 1, a - 1] = sign * mag
            prov[b - 1, a - 1] = SAMPLED_FREE
        else:
            W[b - 1, a - 1] = float(w)
            prov[b - 1, a - 1] = FIXED_FROM_PATTERN
    return WeightRealization(W, prov)


def unit_weights(model: NetworkModel) -> WeightRealization:
    """Free edges at weight 1, fixed edges at their declared values."""
    N = model.node_count
    W = np.zeros((N, N))
    for a, b in model.edges:
        w = model.weights[(a, b)]
        W[b - 1, a - 1] = 1.0 if w == FREE else float(w)
    return realization_from_matrix(model, W)


def output_matrix(dyn: SubsystemDynamics, N: int, sensors: Iterable[int]) -> np.ndarray:
    sensors = sorted(set(sensors))
    if not sensors:
        raise ModelError("sensor set is empty")
    n, p = dyn.n, dyn.p
    Q = np.zeros((p * len(sensors), N * n))
    for row, s in enumerate(sensors):
        if not 1 <= s <= N:
            raise ModelError(f"sensor {s} out of range 1..{N}")
        Q[row * p:(row + 1) * p, (s - 1) * n:s * n] = dyn.C
    return Q


def assemble_lumped(dyn: SubsystemDynamics, weights: WeightRealization, sensors) -> LumpedRealization:
    W = np.asarray(weights.W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise ModelError(f"weight matrix must be square, got {W.shape}")
    N = W.shape[0]
    Phi = np.kron(np.eye(N), dyn.A) + np.kron(W, dyn.H)
    Q = output_matrix(dyn, N, sensors)
    s = tuple(sorted(set(sensors)))
    return LumpedRealization(Phi, Q, (N, dyn.n, dyn.m, dyn.p, len(s)), s)


def delta_phi(w_i: WeightRealization, w_j: WeightRealization, dyn: SubsystemDynamics) -> np.ndarray:
    """``Phi_i - Phi_j = (W_i - W_j) (x) H``."""
    if w_i.W.shape != w_j.W.shape:
        raise ModelError(f"realizations differ in size: {w_i.W.shape} vs {w_j.W.shape}")
    return np.kron(w_i.W - w_j.W, dyn.H)


def scenario_realizations(model: NetworkModel, weights: WeightRealization, scenarios):
    """Realizations for ``[E_0 = {}, E_1, ..., E_r]`` derived from one nominal draw."""
    out = [weights]
    for s in scenarios:
        out.append(weights.without(check_scenario(model, s)))
    return out
