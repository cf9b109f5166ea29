"""Regenerate the bundled network descriptions in src/topodiag/data/."""
import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "topodiag" / "data"


def edge_list(edges, weights=None):
    weights = weights or {}
    return [{"from": a, "to": b, "weight": weights.get((a, b), "free")} for a, b in edges]


def named(prefix, edges):
    return [{"name": f"{prefix}{a}{b}", "edges": [[a, b]]} for a, b in edges]


def example1():
    # single integrators; Phi pattern rows (1: a1 from 4), (2: a2 from 1, a3 from 3),
    # (3: a4 from 4), (4: a5 from 1)
    edges = [(4, 1), (1, 2), (3, 2), (4, 3), (1, 4)]
    return {
        "nodes": 4,
        "edges": edge_list(edges),
        "dynamics": {"A": [[0.0]], "B": [[1.0]], "Gamma": [[1.0]], "C": [[1.0]]},
        "sensors": [3],
        "failures": [{"name": "E1", "edges": [[1, 4]]}, {"name": "E2", "edges": [[4, 3]]}],
        "failure_set": ["E1", "E2"],
    }


def example2():
    edges = [(1, 2), (2, 3), (3, 4), (2, 5), (4, 5), (5, 1)]
    H = [[0.0, 2.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]
    return {
        "nodes": 5,
        "edges": edge_list(edges),
        # B = I and Gamma = H, so H = B Gamma is the coupling matrix above
        "dynamics": {
            "A": [[1.0, -1.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, -1.0]],
            "B": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            "Gamma": H,
            "C": [[1.0, 0.0, 0.0]],
        },
        "sensors": [1],
        "failures": named("f", edges) + [
            {"name": "f45_34", "edges": [[4, 5], [3, 4]]},
            {"name": "f45_only", "edges": [[4, 5]]},
        ],
        "failure_set": ["f45_34", "f45_only"],
    }


IEEE9_LINES = [(1, 4), (4, 5), (4, 6), (5, 7), (6, 9), (7, 8), (8, 9), (2, 7), (3, 9)]


def ieee9():
    # WSCC 9-bus adjacency; unit susceptances and inertias, -d/m = -1;
    # self-loop weight w_ii = -sum_j k_ij / m_i = -degree(i)
    degree = {v: 0 for v in range(1, 10)}
    edges = []
    for a, b in IEEE9_LINES:
        edges += [(a, b), (b, a)]
        degree[a] += 1
        degree[b] += 1
    weights = {e: 1.0 for e in edges}
    for v in range(1, 10):
        edges.append((v, v))
        weights[(v, v)] = -float(degree[v])
    failures = []
    for v in range(1, 10):
        adj = sorted(e for e in edges if v in e)
        failures.append({"name": f"bus{v}", "edges": [list(e) for e in adj]})
    return {
        "nodes": 9,
        "edges": edge_list(edges, weights),
        "dynamics": {
            "A": [[0.0, 1.0], [0.0, -1.0]],
            "B": [[0.0], [1.0]],
            "Gamma": [[1.0, 0.0]],
            "C": [[1.0, 0.0]],
        },
        "sensors": [4],
        "failures": failures,
        "failure_set": [f["name"] for f in failures],
    }


def single_integrator():
    edges = [(1, 2), (2, 3), (3, 1), (3, 4), (5, 4)]
    return {
        "nodes": 5,
        "edges": edge_list(edges),
        "dynamics": {"A": [[0.0]], "B": [[1.0]], "Gamma": [[1.0]], "C": [[1.0]]},
        "sensors": [4],
        "failures": named("f", edges),
        "failure_set": [f"f{a}{b}" for a, b in edges],
    }


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, build in [("example1", example1), ("example2", example2), ("ieee9", ieee9),
                        ("single_integrator", single_integrator)]:
        (OUT / f"{name}.json").write_text(json.dumps(build(), indent=2) + "\n")
        print("wrote", OUT / f"{name}.json")


if __name__ == "__main__":
    main()
