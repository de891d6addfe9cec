"""Seeded benchmark harness comparing ESN, HubESN, and HubESN-rand.

Each trial derives a dataset seed from (base_seed, task, n_train,
trial_index) only, so the three model variants of one trial consume the
same dataset bytes; model construction mixes in a model id on top.
Trials are independent and may run concurrently; aggregation sorts by
grid point and trial index, so results do not depend on the job count.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConstantVector, EmptyInput
from .netmetrics import node_degrees
from .reservoir import (
    EsnConfig,
    fit_readout,
    harvest,
    init_esn,
    normalized_readout_weights,
    pearson,
)
from .tasks import (
    MackeyGlassConfig,
    MnistData,
    NarmaConfig,
    mackey_glass,
    make_one_step_dataset,
    mnist_sequences,
    narma10,
)
from .topology import TopologyConfig

__all__ = [
    "TrialSpec",
    "TrialResult",
    "AggregateResult",
    "rmse",
    "majority_vote_accuracy",
    "run_trial",
    "run_experiment",
    "aggregate",
    "write_results_csv",
    "write_aggregate_csv",
    "dataset_seed",
    "model_seed",
]

TASKS = ("mackey_glass", "narma10", "mnist")
MODELS = ("esn", "hubesn", "hubesn_rand")

_TASK_ID = {name: i + 1 for i, name in enumerate(TASKS)}
_MODEL_ID = {name: i + 1 for i, name in enumerate(MODELS)}

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _mix(*values: int) -> int:
    h = 0
    for v in values:
        h = _splitmix64(h ^ (int(v) & _MASK64))
    return h


def dataset_seed(base_seed: int, task: str, n_train: int, trial_index: int) -> int:
    """Seed for the trial's dataset stream; model-independent by design."""
    return _mix(base_seed, _TASK_ID[task], n_train, trial_index)


def model_seed(base_seed: int, task: str, n_train: int, trial_index: int,
               model: str) -> int:
    """Seed for model construction; mixes a model id on top of the dataset seed."""
    return _mix(base_seed, _TASK_ID[task], n_train, trial_index, _MODEL_ID[model])


@dataclass(frozen=True)
class TrialSpec:
    task: str
    model: str
    n: int
    n_train: int
    n_test: int
    trial_index: int = 0
    base_seed: int = 0

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}")
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")

    @property
    def dataset_seed(self) -> int:
        return dataset_seed(self.base_seed, self.task, self.n_train, self.trial_index)

    @property
    def model_seed(self) -> int:
        return model_seed(self.base_seed, self.task, self.n_train,
                          self.trial_index, self.model)


@dataclass
class TrialResult:
    spec: TrialSpec
    score: float
    degree_weight_r: float | None
    wall_time: float


@dataclass
class AggregateResult:
    task: str
    model: str
    n: int
    n_train: int
    mean: float
    sd: float
    count: int
    ratio_to_esn_mean_of_ratios: float | None
    ratio_to_esn_ratio_of_means: float | None


def rmse(pred: np.ndarray, target: np.ndarray) -> float:
    """Root mean square error over all elements."""
    pred = np.asarray(pred, dtype=float)
    target = np.asarray(target, dtype=float)
    if pred.size == 0 or pred.shape != target.shape:
        raise EmptyInput("rmse needs two nonempty arrays of equal shape")
    return float(np.sqrt(np.mean((pred - target) ** 2)))


def majority_vote_accuracy(step_scores, labels) -> float:
    """Classification accuracy under per-timestep majority voting.

    Each of an image's timesteps votes the argmax of its score vector;
    vote ties break toward the class with the largest summed score, then
    the lowest class index.
    """
    labels = np.asarray(labels)
    if len(step_scores) == 0 or len(step_scores) != labels.shape[0]:
        raise EmptyInput("need one score matrix per label")
    correct = 0
    for scores, label in zip(step_scores, labels):
        scores = np.asarray(scores, dtype=float)
        votes = np.bincount(scores.argmax(axis=1), minlength=scores.shape[1])
        top = votes.max()
        tied = np.flatnonzero(votes == top)
        if tied.size > 1:
            sums = scores[:, tied].sum(axis=0)
            tied = tied[sums == sums.max()]
        if int(tied[0]) == int(label):
            correct += 1
    return correct / labels.shape[0]


def _model_config(spec: TrialSpec, overrides: dict | None) -> EsnConfig:
    overrides = dict(overrides or {})
    topo_mode = "random" if spec.model == "esn" else "hub"
    injection = "hub" if spec.model == "hubesn" else "random"
    topo_kwargs = {
        "n": spec.n,
        "mode": topo_mode,
        "seed": spec.model_seed & ((1 << 32) - 1),
    }
    for key in ("density", "alpha", "beta", "lambda_dc", "lambda_nc",
                "lambda_reg", "weight_sigma2"):
        if key in overrides:
            topo_kwargs[key] = overrides.pop(key)
    input_dim = 28 if spec.task == "mnist" else 1
    output_dim = 10 if spec.task == "mnist" else 1
    kwargs = {
        "n": spec.n,
        "input_dim": input_dim,
        "output_dim": output_dim,
        "injection": injection,
        "seed": topo_kwargs["seed"],
        "topology": TopologyConfig(**topo_kwargs),
    }
    kwargs.update(overrides)
    return EsnConfig(**kwargs)


def _time_series_split(spec: TrialSpec):
    if spec.task == "mackey_glass":
        mg = MackeyGlassConfig(length=spec.n_train + spec.n_test + 1)
        _, series = mackey_glass(mg)
        train, test = make_one_step_dataset(series, spec.n_train, spec.n_test)
        return train.inputs, train.targets, test.inputs, test.targets
    # NARMA pairs input u(t) with target x(t+1); no shifted-series split
    ds_rng = np.random.default_rng(spec.dataset_seed)
    ds = narma10(NarmaConfig(length=spec.n_train + spec.n_test), ds_rng)
    return (ds.inputs[: spec.n_train], ds.targets[: spec.n_train],
            ds.inputs[spec.n_train: spec.n_train + spec.n_test],
            ds.targets[spec.n_train: spec.n_train + spec.n_test])


def _execute(spec: TrialSpec, cfg: EsnConfig, mnist: MnistData | None) -> dict:
    """Train one model on the trial's shared dataset; return the full bundle."""
    model_rng = np.random.default_rng(spec.model_seed)
    if spec.task == "mnist":
        if mnist is None:
            raise ValueError("mnist task requires loaded MnistData")
        ds_rng = np.random.default_rng(spec.dataset_seed)
        if spec.n_train + spec.n_test > mnist.count:
            raise EmptyInput("not enough MNIST images for the requested split")
        perm = ds_rng.permutation(mnist.count)
        train_idx = perm[: spec.n_train]
        test_idx = perm[spec.n_train: spec.n_train + spec.n_test]

        esn = init_esn(cfg, model_rng)
        train_pairs = mnist_sequences(mnist, train_idx)
        train_states = np.concatenate([harvest(esn, seq) for seq, _ in train_pairs])
        train_tg = np.concatenate([np.tile(lab, (28, 1)) for _, lab in train_pairs])
        w_out = fit_readout(train_states, train_tg, washout=cfg.washout)

        test_pairs = mnist_sequences(mnist, test_idx)
        step_scores = [harvest(esn, seq) @ w_out for seq, _ in test_pairs]
        score = majority_vote_accuracy(step_scores, mnist.labels[test_idx])
    else:
        train_in, train_tg, test_in, test_tg = _time_series_split(spec)
        esn = init_esn(cfg, model_rng)
        train_states = harvest(esn, train_in)
        w_out = fit_readout(train_states, train_tg, washout=cfg.washout)
        test_states = harvest(esn, test_in, s0=train_states[-1])
        score = rmse(test_states @ w_out, test_tg)

    w_norm = normalized_readout_weights(w_out, train_states)
    degrees = node_degrees(esn.network)
    try:
        corr = pearson(w_norm, degrees)
    except ConstantVector:
        corr = None
    return {
        "esn": esn,
        "train_states": train_states,
        "w_out": w_out,
        "score": score,
        "w_norm": w_norm,
        "degrees": degrees,
        "degree_weight_r": corr,
    }


def readout_analysis(spec: TrialSpec, overrides: dict | None = None,
                     mnist: MnistData | None = None) -> dict:
    """Train one model and return per-neuron readout diagnostics."""
    return _execute(spec, _model_config(spec, overrides), mnist)


def run_trial(spec: TrialSpec, overrides: dict | None = None,
              mnist: MnistData | None = None,
              compute_correlation: bool = True) -> TrialResult:
    """Build the model, run the shared dataset through it, score it."""
    cfg = _model_config(spec, overrides)
    start = time.perf_counter()
    bundle = _execute(spec, cfg, mnist)
    if not np.isfinite(bundle["score"]):
        raise RuntimeError(f"non-finite score for {spec}")
    corr = bundle["degree_weight_r"] if compute_correlation else None
    return TrialResult(spec=spec, score=bundle["score"], degree_weight_r=corr,
                       wall_time=time.perf_counter() - start)


def run_experiment(grid, repeats: int, base_seed: int, jobs: int = 1,
                   overrides: dict | None = None,
                   mnist: MnistData | None = None,
                   compute_correlation: bool = True) -> list[TrialResult]:
    """Run ``repeats`` trials for every (task, model, n, n_train, n_test).

    Results come back sorted by grid point then trial index, independent
    of the degree of parallelism.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    specs = [
        TrialSpec(task=task, model=model, n=n, n_train=n_train,
                  n_test=n_test, trial_index=t, base_seed=base_seed)
        for task, model, n, n_train, n_test in grid
        for t in range(repeats)
    ]
    runner = lambda s: run_trial(s, overrides=overrides, mnist=mnist,
                                 compute_correlation=compute_correlation)
    if jobs <= 1:
        return [runner(s) for s in specs]
    # pool.map preserves submission order, so the output ordering is
    # identical to the sequential run regardless of worker count
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(runner, specs))


def aggregate(results: list[TrialResult]) -> list[AggregateResult]:
    """Per-setting mean/SD plus both ratio constructions against the ESN baseline."""
    by_point: dict[tuple, list[TrialResult]] = {}
    for r in results:
        key = (r.spec.task, r.spec.model, r.spec.n, r.spec.n_train)
        by_point.setdefault(key, []).append(r)

    out = []
    for (task, model, n, n_train), rs in by_point.items():
        rs = sorted(rs, key=lambda r: r.spec.trial_index)
        scores = np.array([r.score for r in rs])
        base_key = (task, "esn", n, n_train)
        mean_of_ratios = ratio_of_means = None
        if base_key in by_point:
            base = sorted(by_point[base_key], key=lambda r: r.spec.trial_index)
            base_scores = np.array([r.score for r in base])
            if base_scores.shape == scores.shape and np.all(base_scores != 0.0):
                mean_of_ratios = float(np.mean(scores / base_scores))
                ratio_of_means = float(scores.mean() / base_scores.mean())
        out.append(AggregateResult(
            task=task, model=model, n=n, n_train=n_train,
            mean=float(scores.mean()), sd=float(scores.std()),
            count=len(rs),
            ratio_to_esn_mean_of_ratios=mean_of_ratios,
            ratio_to_esn_ratio_of_means=ratio_of_means,
        ))
    return out


def _fmt(x) -> str:
    if x is None:
        return ""
    return f"{x:.17g}" if isinstance(x, float) else str(x)


RESULT_COLUMNS = ["task", "model", "n", "n_train", "n_test", "trial", "seed",
                  "score", "degree_weight_r", "wall_time_s"]

AGGREGATE_COLUMNS = ["task", "model", "n", "n_train", "mean", "sd", "count",
                     "ratio_to_esn_mean_of_ratios", "ratio_to_esn_ratio_of_means"]


def write_results_csv(results: list[TrialResult], path,
                      include_wall_time: bool = True) -> None:
    """Per-trial CSV; wall time can be omitted for byte-reproducible output."""
    cols = RESULT_COLUMNS if include_wall_time else RESULT_COLUMNS[:-1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for r in results:
            row = [r.spec.task, r.spec.model, r.spec.n, r.spec.n_train,
                   r.spec.n_test, r.spec.trial_index, r.spec.dataset_seed,
                   _fmt(r.score), _fmt(r.degree_weight_r)]
            if include_wall_time:
                row.append(_fmt(r.wall_time))
            writer.writerow(row)


def write_aggregate_csv(aggregates: list[AggregateResult], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(AGGREGATE_COLUMNS)
        for a in aggregates:
            writer.writerow([a.task, a.model, a.n, a.n_train, _fmt(a.mean),
                             _fmt(a.sd), a.count,
                             _fmt(a.ratio_to_esn_mean_of_ratios),
                             _fmt(a.ratio_to_esn_ratio_of_means)])
