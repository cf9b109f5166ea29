"""Graph verdicts vs Monte-Carlo algebraic verdicts on random small networks.

Writes every disagreement (with the seeds needed to replay it) to a JSON log.
"""
import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from randinst import random_dynamics, random_failure, random_failure_set, random_model  # noqa: E402

from topodiag.algebraic import generic_detectable_mc, generic_isolable_mc  # noqa: E402
from topodiag.structural import generically_detectable, generically_isolable  # noqa: E402


@dataclass
class OracleConfig:
    seed: int = 0
    detect_instances: int = 2000
    isolate_instances: int = 500
    trials: int = 5
    log: str = "oracle_disagreements.json"


def run(cfg: OracleConfig):
    rng = np.random.default_rng(cfg.seed)
    out = {"config": asdict(cfg), "detect": [], "isolate": [], "r_max_histogram": {}}
    hist = out["r_max_histogram"]
    for k in range(cfg.detect_instances):
        dyn, model = random_dynamics(rng), random_model(rng)
        f = random_failure(rng, model)
        s = generically_detectable(dyn, model, f)
        hist[str(s.r_max)] = hist.get(str(s.r_max), 0) + 1
        a = generic_detectable_mc(dyn, model, f, cfg.trials, seed=1000 * k)
        if s.holds != a.generic:
            out["detect"].append({"instance": k, "edges": model.edges, "sensors": sorted(model.sensors),
                                  "failure": sorted(f), "structural": s.label, "witnesses": a.witnesses})
    for k in range(cfg.isolate_instances):
        dyn, model = random_dynamics(rng), random_model(rng)
        fs = random_failure_set(rng, model)
        s = generically_isolable(dyn, model, fs)
        a = generic_isolable_mc(dyn, model, fs, cfg.trials, seed=1000 * k)
        if s.holds != a.generic:
            out["isolate"].append({"instance": k, "edges": model.edges, "sensors": sorted(model.sensors),
                                   "failure_set": [sorted(x) for x in fs], "structural": s.label,
                                   "witnesses": a.witnesses})
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in asdict(OracleConfig()).items():
        ap.add_argument("--" + name.replace("_", "-"), type=type(default), default=default)
    cfg = OracleConfig(**vars(ap.parse_args()))
    t0 = time.perf_counter()
    out = run(cfg)
    Path(cfg.log).write_text(json.dumps(out, indent=2, default=list) + "\n")
    print(f"detect: {cfg.detect_instances - len(out['detect'])}/{cfg.detect_instances} agree")
    print(f"isolate: {cfg.isolate_instances - len(out['isolate'])}/{cfg.isolate_instances} agree")
    print(f"r_max histogram: {out['r_max_histogram']}")
    print(f"{time.perf_counter() - t0:.1f}s, log in {cfg.log}")


if __name__ == "__main__":
    main()
