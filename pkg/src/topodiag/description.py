"""JSON network descriptions and the bundled fixtures.

Schema (node indices are 1-based)::

    {
      "nodes": 5,
      "edges": [{"from": 1, "to": 2, "weight": "free"}, ...],
      "dynamics": {"A": [[...]], "B": [[...]], "Gamma": [[...]], "C": [[...]]},
      "sensors": [1],
      "failures": [{"name": "f12", "edges": [[1, 2]]}, ...],     # optional
      "failure_set": ["f12", ...]                                 # optional
    }
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .netgraph import FREE, ModelError, NetworkModel, check_scenario
from .sysmodel import SubsystemDynamics

BUNDLED = ("example1", "example2", "ieee9", "single_integrator")


@dataclass(frozen=True)
class NetworkDescription:
    model: NetworkModel
    dynamics: SubsystemDynamics
    failures: dict = field(default_factory=dict)  # name -> frozenset of edges, in file order
    failure_set: tuple = ()
    source: str = ""

    def failure(self, name: str) -> frozenset:
        try:
            return self.failures[name]
        except KeyError:
            raise ModelError(f"unknown failure {name!r}; known: {', '.join(self.failures) or 'none'}") from None

    def scenarios(self, names=None) -> list:
        names = list(names) if names else list(self.failure_set)
        if not names:
            raise ModelError("no failure set given and none declared in the description")
        return [self.failure(n) for n in names]


def _matrix(obj, key):
    try:
        m = np.array(obj[key], dtype=float)
    except KeyError:
        raise ModelError(f"dynamics.{key} missing") from None
    except (TypeError, ValueError) as exc:
        raise ModelError(f"dynamics.{key} is not a numeric matrix: {exc}") from None
    if m.ndim != 2:
        raise ModelError(f"dynamics.{key} must be a 2-D array")
    return m


def from_dict(data: dict, source="") -> NetworkDescription:
    if not isinstance(data, dict):
        raise ModelError("description must be a JSON object")
    try:
        N = int(data["nodes"])
        raw_edges = data["edges"]
        dyn_raw = data["dynamics"]
    except KeyError as exc:
        raise ModelError(f"missing field {exc}") from None
    edges, weights = [], {}
    for e in raw_edges:
        try:
            a, b = int(e["from"]), int(e["to"])
        except (KeyError, TypeError, ValueError):
            raise ModelError(f"malformed edge entry {e!r}") from None
        w = e.get("weight", FREE)
        if w != FREE and not isinstance(w, (int, float)):
            raise ModelError(f"edge ({a},{b}) weight must be a number or 'free'")
        edges.append((a, b))
        weights[(a, b)] = w
    model = NetworkModel(N, tuple(edges), weights, frozenset(data.get("sensors", ())))
    dyn = SubsystemDynamics(*(_matrix(dyn_raw, k) for k in ("A", "B", "Gamma", "C")))
    failures = {}
    for f in data.get("failures", ()):
        name = f.get("name")
        if not name or name in failures:
            raise ModelError(f"failure name missing or duplicated: {name!r}")
        failures[name] = check_scenario(model, (tuple(e) for e in f.get("edges", ())))
    fset = tuple(data.get("failure_set", ()))
    for name in fset:
        if name not in failures:
            raise ModelError(f"failure_set references unknown failure {name!r}")
    return NetworkDescription(model, dyn, failures, fset, source)


def to_dict(desc: NetworkDescription) -> dict:
    m = desc.model
    out = {
        "nodes": m.node_count,
        "edges": [{"from": a, "to": b, "weight": m.weights[(a, b)]} for a, b in m.edges],
        "dynamics": {k: getattr(desc.dynamics, k).tolist() for k in ("A", "B", "Gamma", "C")},
        "sensors": sorted(m.sensors),
    }
    if desc.failures:
        out["failures"] = [{"name": n, "edges": [list(e) for e in sorted(s)]} for n, s in desc.failures.items()]
    if desc.failure_set:
        out["failure_set"] = list(desc.failure_set)
    return out


def load(path_or_name) -> NetworkDescription:
    """Load a description file, or a bundled fixture by name."""
    p = Path(path_or_name)
    if p.is_file():
        text = p.read_text()
        source = str(p)
    elif str(path_or_name) in BUNDLED:
        text = resources.files("topodiag").joinpath("data", f"{path_or_name}.json").read_text()
        source = f"bundled:{path_or_name}"
    else:
        raise ModelError(f"no such description file or bundled fixture: {path_or_name}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"{source}: invalid JSON: {exc}") from None
    return from_dict(data, source)


def dumps(desc: NetworkDescription) -> str:
    return json.dumps(to_dict(desc), indent=2)
