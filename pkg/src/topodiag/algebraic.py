"""Exact, realization-level distinguishability tests.

Two systems ``(Phi_i, Q)`` and ``(Phi_j, Q)`` produce different outputs from
some initial state iff ``Q Phi_i^k (Phi_i - Phi_j) != 0`` for some ``k < n_x``,
equivalently iff ``Q (lambda I - Phi_i)^{-1} (Phi_i - Phi_j)`` is not the zero
rational matrix. Both forms are implemented; the first one is evaluated as a
containment test against the unobservable subspace of ``(Phi_i, Q)`` so that no
matrix powers are ever formed.

Zero tests are relative: a quantity counts as nonzero when it exceeds
``tol`` times the natural scale of its operands (default ``tol = 1e-9``).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import block_diag

from .netgraph import ModelError, NetworkModel, check_scenario, failure_set as _failure_set
from .sysmodel import (
    SubsystemDynamics,
    WeightRealization,
    assemble_lumped,
    output_matrix,
    sample_weights,
)

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
TRANSFER_SAMPLES = 3
MAX_RESOLVE = 10


class NotDistinguishableError(ValueError):
    """A pair of systems that no initial state can tell apart."""


@dataclass(frozen=True)
class DistinguishabilityReport:
    distinguishable: bool
    evidence: str  # "stacked", "stacked_literal" or "transfer"
    norm: float
    tolerance: float
    lambdas: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "distinguishable", bool(self.distinguishable))
        object.__setattr__(self, "norm", float(self.norm))

    def __bool__(self):
        return self.distinguishable


@dataclass(frozen=True)
class IsolabilityReport:
    isolable: bool
    pairs: dict  # (i, j) -> DistinguishabilityReport, 0 <= i < j <= r
    failing_pairs: tuple

    def __bool__(self):
        return self.isolable


@dataclass(frozen=True)
class GenericVerdict:
    """Monte-Carlo verdict of a generic property.

    A single witness proves the property generic. A negative verdict only says
    no sampled realization worked, hence ``probabilistic`` is set.
    """

    generic: bool
    trials: int
    witnesses: tuple
    seeds: tuple = ()

    @property
    def probabilistic(self) -> bool:
        return not self.generic

    def __bool__(self):
        return self.generic


@dataclass(frozen=True)
class InitialStateWitness:
    x0: np.ndarray
    draws: int
    margins: dict = field(default_factory=dict)


def _check_tol(tol):
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")


def _range_basis(M, threshold):
    if M.size == 0:
        return np.zeros((M.shape[0], 0))
    u, s, _ = np.linalg.svd(M, full_matrices=False)
    return u[:, s > threshold]


def observable_basis(phi, q, tol=DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the row space of the observability matrix.

    Krylov staircase on ``phi.T`` seeded with ``q.T``: each step keeps only the
    directions new relative to the running basis, with a rank cut at
    ``tol * ||phi||`` (``tol * ||q||`` for the seed block).
    """
    phi = np.asarray(phi, dtype=float)
    q = np.atleast_2d(np.asarray(q, dtype=float))
    n = phi.shape[0]
    if phi.shape != (n, n) or q.shape[1] != n:
        raise ModelError(f"incompatible shapes phi {phi.shape}, q {q.shape}")
    scale_q = np.linalg.norm(q, 2) if q.size else 0.0
    basis = _range_basis(q.T, tol * scale_q) if scale_q > 0 else np.zeros((n, 0))
    block = basis
    scale = np.linalg.norm(phi, 2)
    while block.shape[1] and basis.shape[1] < n:
        cand = phi.T @ block
        # twice is enough for numerical orthogonality
        cand -= basis @ (basis.T @ cand)
        cand -= basis @ (basis.T @ cand)
        block = _range_basis(cand, tol * scale)
        if block.shape[1]:
            block -= basis @ (basis.T @ block)
            block, _ = np.linalg.qr(block)
            basis = np.hstack([basis, block])
    return basis


def unobservable_subspace(phi, q, tol=DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of ``ker col{Q, Q Phi, ..., Q Phi^(n-1)}``."""
    obs = observable_basis(phi, q, tol)
    n = np.asarray(phi).shape[0]
    k = obs.shape[1]
    if k == 0:
        return np.eye(n)
    if k >= n:
        return np.zeros((n, 0))
    full, _ = np.linalg.qr(obs, mode="complete")
    return full[:, k:]


def _check_pair(phi_i, phi_j, q, tol):
    _check_tol(tol)
    phi_i = np.asarray(phi_i, dtype=float)
    phi_j = np.asarray(phi_j, dtype=float)
    q = np.atleast_2d(np.asarray(q, dtype=float))
    n = phi_i.shape[0]
    if phi_i.shape != (n, n) or phi_j.shape != (n, n) or q.shape[1] != n:
        raise ModelError(f"dimension mismatch: {phi_i.shape}, {phi_j.shape}, q {q.shape}")
    return phi_i, phi_j, q


def is_distinguishable(phi_i, phi_j, q, tol=DEFAULT_TOL) -> DistinguishabilityReport:
    """Distinguishable iff some column of ``Phi_i - Phi_j`` leaves the
    unobservable subspace of ``(Phi_i, Q)`` by more than ``tol`` relative to
    that column's norm."""
    phi_i, phi_j, q = _check_pair(phi_i, phi_j, q, tol)
    delta = phi_i - phi_j
    col_norms = np.linalg.norm(delta, axis=0)
    nz = col_norms > 0
    if not nz.any():
        return DistinguishabilityReport(False, "stacked", 0.0, tol)
    obs = observable_basis(phi_i, q, tol)
    proj = np.linalg.norm(obs.T @ delta[:, nz], axis=0)
    ratio = float(np.max(proj / col_norms[nz])) if obs.shape[1] else 0.0
    return DistinguishabilityReport(ratio > tol, "stacked", ratio, tol)


def stacked_check(phi_i, phi_j, q, tol=DEFAULT_TOL) -> DistinguishabilityReport:
    """Literal ``col{Q dPhi, Q Phi dPhi, ...}`` test with per-row normalization.

    Each row of ``Q Phi^k`` is rescaled to unit length after every step, which
    keeps the zero/nonzero pattern intact while avoiding overflow. Rescaling a
    row that shrank by ``||Phi||/||row||`` magnifies its rounding error by the
    same factor; that growth is tracked per row and raises the zero threshold.
    Meant as an independent cross-check for small ``n_x``.
    """
    phi_i, phi_j, q = _check_pair(phi_i, phi_j, q, tol)
    delta = phi_i - phi_j
    dnorm = np.linalg.norm(delta, 2)
    if dnorm == 0:
        return DistinguishabilityReport(False, "stacked_literal", 0.0, tol)
    n = phi_i.shape[0]
    eps = np.finfo(float).eps
    scale = np.linalg.norm(phi_i, 2)
    norms = np.linalg.norm(q, axis=1)
    rows = q[norms > 0] / norms[norms > 0, None]
    growth = np.ones(rows.shape[0])
    best = 0.0
    for _ in range(n):
        if rows.shape[0] == 0:
            break
        vals = np.max(np.abs(rows @ delta), axis=1) / dnorm
        noise = 10.0 * n * eps * growth
        best = max(best, float(np.max(np.where(vals > noise, vals, 0.0))))
        if best > tol:
            break
        rows = rows @ phi_i
        norms = np.linalg.norm(rows, axis=1)
        keep = norms > tol * scale
        growth = growth[keep] * scale / norms[keep] + 1.0
        rows = rows[keep] / norms[keep, None]
    return DistinguishabilityReport(best > tol, "stacked_literal", best, tol)


def _sample_lambda(rng, radius):
    return radius * (1.0 + rng.random()) * np.exp(2j * np.pi * rng.random())


def spectral_radius(M) -> float:
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(M))))


def transfer_check(phi, delta, q, samples=TRANSFER_SAMPLES, tol=DEFAULT_TOL, seed=0) -> DistinguishabilityReport:
    """Evaluate ``Q (lambda I - Phi)^{-1} dPhi`` at random complex points.

    Points satisfy ``|lambda| in (2 rho + 1, 2 (2 rho + 1))``. Each evaluation is
    compared with ``||Q|| * ||(lambda I - Phi)^{-1} dPhi||``, its roundoff scale.
    """
    _check_tol(tol)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    phi = np.asarray(phi, dtype=float)
    delta = np.asarray(delta, dtype=float)
    q = np.atleast_2d(np.asarray(q, dtype=float))
    n = phi.shape[0]
    if phi.shape != (n, n) or delta.shape[0] != n or q.shape[1] != n:
        raise ModelError(f"dimension mismatch: {phi.shape}, {delta.shape}, q {q.shape}")
    if not np.any(delta):
        return DistinguishabilityReport(False, "transfer", 0.0, tol)
    rng = np.random.default_rng(seed)
    radius = 2.0 * spectral_radius(phi) + 1.0
    qnorm = np.linalg.norm(q, 2)
    best = 0.0
    lambdas = []
    for _ in range(samples):
        for _attempt in range(MAX_RESOLVE + 1):
            lam = _sample_lambda(rng, radius)
            try:
                X = np.linalg.solve(lam * np.eye(n) - phi, delta)
            except np.linalg.LinAlgError:
                continue
            if np.all(np.isfinite(X)):
                break
        else:
            raise np.linalg.LinAlgError("resolvent solve failed after retries")
        lambdas.append(lam)
        G = q @ X
        ref = qnorm * np.linalg.norm(X, 2)
        if ref > 0:
            best = max(best, float(np.max(np.abs(G))) / ref)
    return DistinguishabilityReport(best > tol, "transfer", best, tol, tuple(lambdas))


def _lumped_pair(dyn, model, weights, failure):
    model.require_sensors()
    if weights.W.shape != (model.node_count,) * 2:
        raise ModelError("weight realization does not match the model size")
    nominal = assemble_lumped(dyn, weights, model.sensors)
    faulty = assemble_lumped(dyn, weights.without(failure), model.sensors)
    return nominal, faulty


def is_detectable(dyn: SubsystemDynamics, model: NetworkModel, failure, weights: WeightRealization,
                  tol=DEFAULT_TOL) -> DistinguishabilityReport:
    failure = check_scenario(model, failure)
    nominal, faulty = _lumped_pair(dyn, model, weights, failure)
    return is_distinguishable(nominal.Phi, faulty.Phi, nominal.Q, tol)


def is_isolable(dyn: SubsystemDynamics, model: NetworkModel, failures: Sequence, weights: WeightRealization,
                tol=DEFAULT_TOL) -> IsolabilityReport:
    """Check every pair ``0 <= i < j <= r`` of ``[{}, E_1, ..., E_r]``."""
    model.require_sensors()
    scenarios = (frozenset(),) + _failure_set(model, failures)
    Q = output_matrix(dyn, model.node_count, model.sensors)
    phis = [assemble_lumped(dyn, weights.without(s), model.sensors).Phi for s in scenarios]
    pairs = {}
    failing = []
    for i in range(len(phis)):
        for j in range(i + 1, len(phis)):
            rep = is_distinguishable(phis[i], phis[j], Q, tol)
            pairs[(i, j)] = rep
            if not rep:
                failing.append((i, j))
    return IsolabilityReport(not failing, pairs, tuple(failing))


def pair_output_matrix(phi_i, phi_j, q) -> np.ndarray:
    """Literal ``F_ij = col{Q (Phi_i^k - Phi_j^k), k = 1..2 n_x - 1}``.

    Forms matrix powers; only sensible for small, well-scaled systems.
    """
    phi_i = np.asarray(phi_i, dtype=float)
    phi_j = np.asarray(phi_j, dtype=float)
    n = phi_i.shape[0]
    blocks = []
    Pi, Pj = np.eye(n), np.eye(n)
    for _ in range(1, 2 * n):
        Pi = Pi @ phi_i
        Pj = Pj @ phi_j
        blocks.append(q @ (Pi - Pj))
    return np.vstack(blocks)


def _pair_observable(phi_i, phi_j, q, tol):
    aug_phi = block_diag(phi_i, phi_j)
    aug_q = np.hstack([q, -q])
    return observable_basis(aug_phi, aug_q, tol)


def witness_initial_state(phis: Sequence, q, seed=0, tol=DEFAULT_TOL, max_draws=20) -> InitialStateWitness:
    """Draw a unit-norm ``x0`` whose outputs differ for every pair of ``phis``.

    ``F_ij x0 != 0`` is certified on the augmented pair
    ``(diag(Phi_i, Phi_j), [Q, -Q])`` with initial state ``[x0; x0]``.
    """
    _check_tol(tol)
    q = np.atleast_2d(np.asarray(q, dtype=float))
    n = q.shape[1]
    stacked_identity = np.vstack([np.eye(n), np.eye(n)])
    bases = {}
    for i in range(len(phis)):
        for j in range(i + 1, len(phis)):
            obs = _pair_observable(np.asarray(phis[i], float), np.asarray(phis[j], float), q, tol)
            if obs.shape[1] == 0 or np.linalg.norm(obs.T @ stacked_identity, 2) / np.sqrt(2) <= tol:
                raise NotDistinguishableError(f"systems {i} and {j} are not distinguishable")
            bases[(i, j)] = obs
    rng = np.random.default_rng(seed)
    for draw in range(1, max_draws + 1):
        x0 = rng.standard_normal(n)
        x0 /= np.linalg.norm(x0)
        margins = certify_initial_state(bases, x0)
        if all(m > tol for m in margins.values()):
            return InitialStateWitness(x0, draw, margins)
    raise RuntimeError(f"no certified initial state in {max_draws} draws")


def certify_initial_state(bases: dict, x0) -> dict:
    x0 = np.asarray(x0, dtype=float)
    stacked = np.concatenate([x0, x0])
    nrm = np.linalg.norm(stacked)
    if nrm == 0:
        return {k: 0.0 for k in bases}
    return {k: float(np.linalg.norm(b.T @ stacked) / nrm) for k, b in bases.items()}


def pair_bases(phis: Sequence, q, tol=DEFAULT_TOL) -> dict:
    q = np.atleast_2d(np.asarray(q, dtype=float))
    return {(i, j): _pair_observable(np.asarray(phis[i], float), np.asarray(phis[j], float), q, tol)
            for i in range(len(phis)) for j in range(i + 1, len(phis))}


def trial_seeds(seed, trials):
    if trials < 1:
        raise ValueError("trials must be >= 1")
    return tuple(int(seed) + k for k in range(trials))


def generic_detectable_mc(dyn, model, failure, trials=5, tol=DEFAULT_TOL, seed=0) -> GenericVerdict:
    failure = check_scenario(model, failure)
    seeds = trial_seeds(seed, trials)
    witnesses = [s for s in seeds if is_detectable(dyn, model, failure, sample_weights(model, s), tol)]
    return GenericVerdict(bool(witnesses), trials, tuple(sorted(witnesses)), seeds)


def generic_isolable_mc(dyn, model, failures, trials=5, tol=DEFAULT_TOL, seed=0) -> GenericVerdict:
    seeds = trial_seeds(seed, trials)
    witnesses = [s for s in seeds if is_isolable(dyn, model, failures, sample_weights(model, s), tol)]
    return GenericVerdict(bool(witnesses), trials, tuple(sorted(witnesses)), seeds)
