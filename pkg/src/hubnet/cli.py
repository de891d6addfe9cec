"""Command-line interface: gen, metrics, bench, analyze-readout, plot.

Exit codes: 0 success, 1 runtime error, 2 usage error.  ``HUBNET_SEED``
overrides the default seed when ``--seed`` is not given.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import bench as bench_mod
from . import netmetrics, reservoir, tasks, topology
from .errors import HubnetError

TASK_FLAG_TO_NAME = {
    "mackey-glass": "mackey_glass",
    "narma10": "narma10",
    "mnist": "mnist",
}
MODEL_FLAG_TO_NAME = {
    "esn": "esn",
    "hubesn": "hubesn",
    "hubesn-rand": "hubesn_rand",
}


def _default_seed() -> int:
    env = os.environ.get("HUBNET_SEED")
    return int(env) if env else 0


def _add_topology_flags(p: argparse.ArgumentParser, require_n: bool = True):
    p.add_argument("--n", type=int, required=require_n, help="node count")
    p.add_argument("--density", type=float, default=0.2,
                   help="fraction of off-diagonal edges retained (default 0.2)")
    p.add_argument("--alpha", type=float, default=2.0,
                   help="distance-constraint exponent (default 2)")
    p.add_argument("--beta", type=float, default=2.0,
                   help="index-sum-constraint exponent (default 2)")
    p.add_argument("--lambda-dc", type=float, default=0.5,
                   help="distance-constraint weight (default 0.5)")
    p.add_argument("--lambda-nc", type=float, default=0.5,
                   help="index-sum-constraint weight (default 0.5)")
    p.add_argument("--lambda-reg", type=float, default=0.0,
                   help="random-regularizer weight (default 0)")
    p.add_argument("--weight-sigma2", type=float, default=1.0 / 3.0,
                   help="recurrent weight variance (default 1/3)")


def _topology_config(args, mode: str) -> topology.TopologyConfig:
    return topology.TopologyConfig(
        n=args.n, density=args.density, alpha=args.alpha, beta=args.beta,
        lambda_dc=args.lambda_dc, lambda_nc=args.lambda_nc,
        lambda_reg=args.lambda_reg, mode=mode,
        weight_sigma2=args.weight_sigma2, seed=args.seed,
    )


def cmd_gen(args) -> int:
    cfg = _topology_config(args, args.mode)
    net = topology.generate_network(cfg)
    topology.save_network(net, args.out)
    return 0


def cmd_metrics(args) -> int:
    net = topology.load_network(getattr(args, "in"))
    metrics = netmetrics.network_metrics(net)
    doc = json.dumps(metrics, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(doc + "\n")
    else:
        print(doc)
    if args.degrees_out:
        degrees = netmetrics.node_degrees(net)
        with open(args.degrees_out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["node", "degree"])
            for i, d in enumerate(degrees):
                writer.writerow([i, int(d)])
    return 0


def _overrides_from_args(args) -> dict:
    ov = {
        "density": args.density,
        "alpha": args.alpha,
        "beta": args.beta,
        "lambda_dc": args.lambda_dc,
        "lambda_nc": args.lambda_nc,
        "lambda_reg": args.lambda_reg,
        "weight_sigma2": args.weight_sigma2,
        "spec_rad": args.spec_rad,
        "r_sig": args.r_sig,
        "washout": args.washout,
    }
    return ov


def _load_mnist_if_needed(args, task: str):
    if task != "mnist":
        return None
    if not args.mnist_images or not args.mnist_labels:
        raise UsageError("task=mnist requires --mnist-images and --mnist-labels")
    return tasks.load_mnist(args.mnist_images, args.mnist_labels)


class UsageError(Exception):
    pass


def cmd_bench(args) -> int:
    task = TASK_FLAG_TO_NAME[args.task]
    models = []
    for flag in args.models.split(","):
        flag = flag.strip()
        if flag not in MODEL_FLAG_TO_NAME:
            raise UsageError(f"unknown model {flag!r}")
        models.append(MODEL_FLAG_TO_NAME[flag])
    mnist = _load_mnist_if_needed(args, task)
    grid = [(task, m, args.n, args.n_train, args.n_test) for m in models]
    results = bench_mod.run_experiment(
        grid, repeats=args.repeats, base_seed=args.seed, jobs=args.jobs,
        overrides=_overrides_from_args(args), mnist=mnist,
    )
    bench_mod.write_results_csv(results, args.out,
                                include_wall_time=not args.omit_timing)
    if args.aggregate_out:
        bench_mod.write_aggregate_csv(bench_mod.aggregate(results),
                                      args.aggregate_out)
    return 0


def cmd_analyze_readout(args) -> int:
    task = TASK_FLAG_TO_NAME[args.task]
    model = MODEL_FLAG_TO_NAME[args.model]
    mnist = _load_mnist_if_needed(args, task)
    spec = bench_mod.TrialSpec(task=task, model=model, n=args.n,
                               n_train=args.n_train, n_test=args.n_test,
                               trial_index=args.trial, base_seed=args.seed)
    bundle = bench_mod.readout_analysis(spec, overrides=_overrides_from_args(args),
                                        mnist=mnist)
    esn = bundle["esn"]
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["neuron", "degree", "normalized_weight", "is_input"])
        for i in range(esn.n):
            writer.writerow([i, int(bundle["degrees"][i]),
                             f"{bundle['w_norm'][i]:.17g}",
                             int(esn.input_mask[i])])
    r = bundle["degree_weight_r"]
    print(f"pearson_r={'' if r is None else f'{r:.17g}'}")
    print(f"score={bundle['score']:.17g}")
    return 0


def cmd_plot(args) -> int:
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise RuntimeError("plotting requires matplotlib") from exc
    rows = []
    with open(getattr(args, "in"), newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append(row)
    if not rows:
        raise RuntimeError("aggregate CSV has no rows")
    fig, ax = plt.subplots()
    models = sorted({r["model"] for r in rows})
    for model in models:
        pts = sorted(
            ((int(r["n_train"]), float(r["mean"])) for r in rows if r["model"] == model)
        )
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=model)
    ax.set_xlabel("n_train")
    ax.set_ylabel("mean score")
    ax.legend()
    fig.savefig(args.out, format="svg")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hubnet",
        description="Hub-structured reservoir networks: generation, metrics, benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a network and write it as JSON")
    _add_topology_flags(p_gen)
    p_gen.add_argument("--mode", choices=["hub", "random"], default="hub")
    p_gen.add_argument("--seed", type=int, default=_default_seed())
    p_gen.add_argument("--out", required=True, help="output network JSON path")
    p_gen.set_defaults(func=cmd_gen)

    p_met = sub.add_parser("metrics", help="measure a stored network")
    p_met.add_argument("--in", required=True, help="network JSON path")
    p_met.add_argument("--out", help="metrics JSON path (default: stdout)")
    p_met.add_argument("--degrees-out", help="optional per-node degree CSV")
    p_met.set_defaults(func=cmd_metrics)

    def add_run_flags(p, with_models: bool):
        p.add_argument("--task", choices=sorted(TASK_FLAG_TO_NAME), required=True)
        if with_models:
            p.add_argument("--models", default="esn,hubesn,hubesn-rand",
                           help="comma-separated subset of esn,hubesn,hubesn-rand")
        else:
            p.add_argument("--model", choices=sorted(MODEL_FLAG_TO_NAME),
                           default="hubesn")
        _add_topology_flags(p)
        p.add_argument("--spec-rad", type=float, default=0.9,
                       help="spectral radius of the recurrent matrix (default 0.9)")
        p.add_argument("--r-sig", type=float, default=0.1,
                       help="fraction of neurons receiving input (default 0.1)")
        p.add_argument("--washout", type=int, default=0,
                       help="initial states discarded before fitting (default 0)")
        p.add_argument("--n-train", type=int, required=True)
        p.add_argument("--n-test", type=int, default=2000)
        p.add_argument("--seed", type=int, default=_default_seed())
        p.add_argument("--mnist-images", help="IDX image file (.gz ok)")
        p.add_argument("--mnist-labels", help="IDX label file (.gz ok)")

    p_bench = sub.add_parser("bench", help="run the seeded benchmark grid")
    add_run_flags(p_bench, with_models=True)
    p_bench.add_argument("--repeats", type=int, default=100,
                         help="trials per setting (default 100)")
    p_bench.add_argument("--jobs", type=int, default=1, help="parallel trial workers")
    p_bench.add_argument("--out", required=True, help="per-trial results CSV")
    p_bench.add_argument("--aggregate-out", help="aggregate CSV path")
    p_bench.add_argument("--omit-timing", action="store_true",
                         help="drop the wall_time_s column for byte-reproducible CSVs")
    p_bench.set_defaults(func=cmd_bench)

    p_an = sub.add_parser("analyze-readout",
                          help="train one model and export per-neuron readout weights")
    add_run_flags(p_an, with_models=False)
    p_an.add_argument("--trial", type=int, default=0, help="trial index")
    p_an.add_argument("--out", required=True, help="per-neuron CSV path")
    p_an.set_defaults(func=cmd_analyze_readout)

    p_plot = sub.add_parser("plot", help="SVG line chart of an aggregate CSV")
    p_plot.add_argument("--in", required=True, help="aggregate CSV path")
    p_plot.add_argument("--out", required=True, help="output SVG path")
    p_plot.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (HubnetError, OSError, ValueError, RuntimeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
