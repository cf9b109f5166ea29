"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 structural and Monte-Carlo verdicts
disagree, 4 infeasible placement.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import algebraic, description, placement, sim, structural
from .netgraph import FREE, INF, IdenticalScenariosError, ModelError, failure_set
from .sysmodel import assemble_lumped, sample_weights, unit_weights

log = logging.getLogger("topodiag")

EXIT_OK, EXIT_INPUT, EXIT_DISAGREE, EXIT_INFEASIBLE = 0, 2, 3, 4

DEFAULT_TRIALS = 5


def _num(x):
    if x == INF:
        return "infinite"
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def _pair(p):
    return None if p is None else list(p)


def _emit(doc):
    print(json.dumps(doc, indent=2, sort_keys=True))


def _sensor_list(text):
    try:
        nodes = [int(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad node list {text!r}") from None
    if not nodes:
        raise argparse.ArgumentTypeError("empty node list")
    return nodes


def _load(args):
    desc = description.load(args.description)
    model = desc.model
    if getattr(args, "sensors", None):
        model = model.with_sensors(args.sensors)
    return desc, model


def _common(args, desc, model):
    return {
        "command": args.command,
        "description": desc.source,
        "sensors": sorted(model.sensors),
        "seed": args.seed,
        "trials": args.trials,
        "tolerance": args.tol,
    }


def cmd_rmax(args):
    desc = description.load(args.description)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rm = structural.transfer_index(desc.dynamics, tol=args.tol, seed=args.seed)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    print(f"r_max = {rm}")
    print(f"certified by: {rm.certified_by}")
    return EXIT_OK


def cmd_detect(args):
    desc, model = _load(args)
    failure = desc.failure(args.failure)
    model.require_sensors()
    rm = structural.transfer_index(desc.dynamics, tol=args.tol, seed=args.seed)
    sv = structural.generically_detectable(desc.dynamics, model, failure, rm)
    mc = algebraic.generic_detectable_mc(desc.dynamics, model, failure, args.trials, args.tol, args.seed)
    agree = sv.holds == mc.generic
    doc = _common(args, desc, model)
    doc.update({
        "failure": {"name": args.failure, "edges": [list(e) for e in sorted(failure)]},
        "structural": {"verdict": sv.label, "witness_path": list(sv.witness_path) if sv.witness_path else None},
        "algebraic": {
            "verdict": "GenericallyTrue" if mc.generic else "GenericallyFalse",
            "witnesses": list(mc.witnesses),
            "probabilistic": mc.probabilistic,
        },
        "indices": {"r_max": _num(rm.value), "d_min": _num(sv.distance)},
        "agree": agree,
    })
    _emit(doc)
    if not agree:
        print("warning: structural and Monte-Carlo verdicts disagree", file=sys.stderr)
        return EXIT_DISAGREE
    return EXIT_OK


def cmd_isolate(args):
    desc, model = _load(args)
    names = args.set or list(desc.failure_set)
    scenarios = desc.scenarios(names)
    model.require_sensors()
    # duplicates are rejected up front: they can never be told apart
    failure_set(model, scenarios)
    rm = structural.transfer_index(desc.dynamics, tol=args.tol, seed=args.seed)
    shortcut = structural.disjoint_isolability_shortcut(desc.dynamics, model, scenarios, rm)
    full = structural.generically_isolable(desc.dynamics, model, scenarios, rm)
    sv = shortcut if shortcut is not None else full
    mc = algebraic.generic_isolable_mc(desc.dynamics, model, scenarios, args.trials, args.tol, args.seed)
    agree = sv.holds == mc.generic and full.holds == sv.holds
    doc = _common(args, desc, model)
    doc.update({
        "failure_set": names,
        "structural": {
            "verdict": sv.label,
            "route": sv.route,
            "failing_pair": _pair(full.failing_pair),
            "pair_distances": {f"{i},{j}": _num(d) for (i, j), d in sorted(full.pair_distances.items())},
        },
        "algebraic": {
            "verdict": "GenericallyTrue" if mc.generic else "GenericallyFalse",
            "witnesses": list(mc.witnesses),
            "probabilistic": mc.probabilistic,
        },
        "indices": {"r_max": _num(rm.value), "d_min_E": _num(full.distance)},
        "agree": agree,
    })
    _emit(doc)
    if not agree:
        print("warning: structural and Monte-Carlo verdicts disagree", file=sys.stderr)
        return EXIT_DISAGREE
    return EXIT_OK


def cmd_place(args):
    desc, model = _load(args)
    rm = structural.transfer_index(desc.dynamics, tol=args.tol, seed=args.seed)
    if args.mode == "detect":
        inst = placement.build_detect_instance(desc.dynamics, model, args.candidates, rm)
        names = None
    else:
        names = args.set or list(desc.failure_set)
        inst = placement.build_isolate_instance(desc.dynamics, model, desc.scenarios(names), args.candidates, rm)
    greedy = placement.greedy_hitting_set(inst)
    doc = {
        "command": "place",
        "mode": args.mode,
        "description": desc.source,
        "r_max": _num(rm.value),
        "ground_set": list(inst.ground_set),
        "targets": [{"label": _label(lab), "nodes": sorted(t)} for lab, t in zip(inst.labels, inst.targets)],
        "greedy": {"sensors": list(greedy.sensors), "bound": greedy.bound},
        "exact": None,
    }
    if names is not None:
        doc["failure_set"] = names
    if len(inst.ground_set) <= args.exact_limit:
        exact = placement.exact_hitting_set(inst, args.exact_limit)
        doc["exact"] = {"sensors": list(exact.sensors), "size": len(exact.sensors)}
        doc["ratio"] = len(greedy.sensors) / len(exact.sensors) if exact.sensors else 1.0
    if args.mode == "detect":
        doc["note"] = "each target contains its own node (dist(v, v) = 0); see README, 'Distance convention'"
    _emit(doc)
    return EXIT_OK


def _label(lab):
    return list(lab) if isinstance(lab, tuple) else lab


def _weights(desc, mode, seed):
    if mode == "unit":
        return unit_weights(desc.model)
    return sample_weights(desc.model, seed)


def cmd_simulate(args):
    desc, model = _load(args)
    model.require_sensors()
    names = args.failures or []
    failures = [desc.failure(n) for n in names]
    all_fixed = all(w != FREE for w in desc.model.weights.values())
    mode = "fixed" if all_fixed else args.weights
    W = _weights(desc, "unit" if all_fixed else args.weights, args.seed)
    grid = sim.time_grid(args.horizon, args.steps)
    n_x = model.node_count * desc.dynamics.n
    x0 = args.x0_scale * sim.random_initial_state(n_x, args.seed)

    def run(sensors):
        trajs = [sim.propagate(assemble_lumped(desc.dynamics, W, sensors), x0, grid, "nominal")]
        for n, f in zip(names, failures):
            trajs.append(sim.propagate(assemble_lumped(desc.dynamics, W.without(f), sensors), x0, grid, n))
        return trajs

    trajs = run(model.sensors)
    doc = {
        "command": "simulate",
        "description": desc.source,
        "sensors": sorted(model.sensors),
        "seed": args.seed,
        "weights": mode,
        "horizon": args.horizon,
        "steps": args.steps,
        "x0_scale": args.x0_scale,
        "residual_sup": {t.label: sim.residual(trajs[0], t)[1] for t in trajs[1:]},
    }
    if args.out:
        out = sim.export_csv(trajs, args.out)
        meta = dict(doc, csv=str(out), weight_matrix=W.W.tolist(), x0=x0.tolist())
        sim.write_metadata(Path(str(out) + ".meta.json"), meta)
        doc["csv"] = str(out)
    if args.threshold is not None:
        sets = args.sensor_sets or [sorted(model.sensors)]
        seeds = [args.seed + k for k in range(args.repeats)]
        detect = {}
        for s in sets:
            tr = run(s)
            key = ",".join(str(v) for v in sorted(s))
            detect[key] = {}
            for t in tr[1:]:
                times = [sim.detection_time(tr[0], t, args.noise_std, args.threshold, sd).first_detection_time
                         for sd in seeds]
                finite = [v for v in times if v is not None]
                detect[key][t.label] = {
                    "times": times,
                    "median": float(np.median([v if v is not None else np.inf for v in times]))
                    if len(finite) * 2 > len(times) else None,
                }
        doc.update({"noise_std": args.noise_std, "threshold": args.threshold, "detection": detect})
    _emit(doc)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="topodiag", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, trials=True):
        sp.add_argument("description", help="JSON network description or bundled fixture name")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float, default=algebraic.DEFAULT_TOL)
        if trials:
            sp.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
            sp.add_argument("--sensors", type=_sensor_list, help="override sensor nodes, e.g. 1,4")

    sp = sub.add_parser("rmax", help="transfer index of the subsystem dynamics")
    common(sp, trials=False)
    sp.set_defaults(func=cmd_rmax)

    sp = sub.add_parser("detect", help="generic detectability of one failure")
    common(sp)
    sp.add_argument("--failure", required=True)
    sp.set_defaults(func=cmd_detect)

    sp = sub.add_parser("isolate", help="generic isolability of a failure set")
    common(sp)
    sp.add_argument("--set", nargs="+", metavar="NAME")
    sp.set_defaults(func=cmd_isolate)

    sp = sub.add_parser("place", help="minimum sensor placement")
    common(sp, trials=False)
    sp.add_argument("--mode", choices=("detect", "isolate"), default="detect")
    sp.add_argument("--set", nargs="+", metavar="NAME")
    sp.add_argument("--exact-limit", type=int, default=16)
    sp.add_argument("--candidates", type=_sensor_list, help="restrict candidate sensor nodes")
    sp.set_defaults(func=cmd_place, sensors=None)

    sp = sub.add_parser("simulate", help="output trajectories and noisy detection times")
    common(sp, trials=False)
    sp.add_argument("--sensors", type=_sensor_list)
    sp.add_argument("--failures", nargs="*", metavar="NAME")
    sp.add_argument("--weights", choices=("sample", "unit"), default="sample")
    sp.add_argument("--horizon", type=float, default=sim.DEFAULT_HORIZON)
    sp.add_argument("--steps", type=int, default=sim.DEFAULT_STEPS)
    sp.add_argument("--x0-scale", type=float, default=1.0)
    sp.add_argument("--noise-std", type=float, default=0.0)
    sp.add_argument("--threshold", type=float)
    sp.add_argument("--sensor-sets", type=_sensor_list, nargs="+", metavar="NODES")
    sp.add_argument("--repeats", type=int, default=1, help="noise seeds per detection experiment")
    sp.add_argument("--out", help="CSV path; metadata goes to <out>.meta.json")
    sp.set_defaults(func=cmd_simulate, trials=None)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("TOPODIAG_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except IdenticalScenariosError as exc:
        print(f"error: {exc}; identical scenarios always produce the same outputs, "
              "so the set is not isolable", file=sys.stderr)
        return EXIT_INPUT
    except placement.InfeasiblePlacementError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
