"""Echo state network: init, dynamics, state harvesting, linear readout.

The recurrent matrix comes from the topology module and is rescaled to a
target spectral radius.  Input reaches only a fraction of the neurons
(``r_sig``): the highest-degree ones under hub injection, a uniform
sample otherwise.  The readout is the closed-form least-squares solution
on the harvested state matrix; subset readouts and normalized-weight
analysis support the mechanistic comparisons.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import (
    ConstantVector,
    DimensionMismatch,
    EmptySubset,
    ZeroSpectrum,
)
from .netmetrics import node_degrees
from .topology import (
    Network,
    TopologyConfig,
    generate_network,
    network_from_dict,
    network_to_dict,
)

__all__ = [
    "EsnConfig",
    "Esn",
    "spectral_radius",
    "scale_spectral_radius",
    "init_esn",
    "step",
    "harvest",
    "fit_readout",
    "predict",
    "fit_subset_readout",
    "normalized_readout_weights",
    "degree_weight_correlation",
    "pearson",
    "save_esn",
    "load_esn",
]


@dataclass(frozen=True)
class EsnConfig:
    """Reservoir hyperparameters.

    ``topology`` defaults to a hub config of matching size; its mode sets
    the recurrent structure while ``injection`` sets where input lands.
    """

    n: int
    input_dim: int = 1
    output_dim: int = 1
    spec_rad: float = 0.9
    r_sig: float = 0.1
    injection: str = "random"
    washout: int = 0
    topology: TopologyConfig | None = None
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.r_sig <= 1.0):
            raise ValueError(f"r_sig must be in (0, 1], got {self.r_sig}")
        if self.spec_rad <= 0.0:
            raise ValueError("spec_rad must be positive")
        if self.injection not in ("hub", "random"):
            raise ValueError(f"injection must be 'hub' or 'random', got {self.injection!r}")
        if self.washout < 0:
            raise ValueError("washout must be nonnegative")
        if self.topology is None:
            object.__setattr__(self, "topology", TopologyConfig(n=self.n, seed=self.seed))
        elif self.topology.n != self.n:
            raise ValueError("topology.n must match the reservoir size")

    @property
    def n_input_neurons(self) -> int:
        return int(np.ceil(self.r_sig * self.n))


@dataclass
class Esn:
    """Initialized reservoir; immutable after construction."""

    w_in: np.ndarray
    w_rec: np.ndarray
    input_mask: np.ndarray
    network: Network
    config: EsnConfig

    @property
    def n(self) -> int:
        return self.w_rec.shape[0]


def spectral_radius(w: np.ndarray, tol: float = 1e-10, max_iter: int = 10_000,
                    block: int = 8, seed: int = 0) -> float:
    """Magnitude of the dominant eigenvalue, by block power iteration.

    Subspace iteration on a small random block with periodic
    Rayleigh-Ritz extraction: the block is orthonormalized and the
    iteration matrix projected onto it, so complex-conjugate dominant
    pairs pose no problem.  Stops once the leading Ritz magnitude is
    stable to ``tol`` (relative) across consecutive extractions.
    """
    w = np.asarray(w, dtype=float)
    n = w.shape[0]
    if n == 0:
        raise ZeroSpectrum("empty matrix has no spectrum")
    k = min(block, n)
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((n, k)))
    est_prev = np.inf
    stable = 0
    est = 0.0
    for it in range(max_iter):
        z = w @ q
        if np.linalg.norm(z) < 1e-300:
            return 0.0  # (numerically) nilpotent: iterates vanish
        q, _ = np.linalg.qr(z)
        if it % 5 == 4 or it == max_iter - 1:
            ritz = np.linalg.eigvals(q.T @ (w @ q))
            est = float(np.abs(ritz).max())
            if est > 0.0 and abs(est - est_prev) <= tol * est:
                stable += 1
                if stable >= 3:
                    break
            else:
                stable = 0
            est_prev = est
    return est


def scale_spectral_radius(w: np.ndarray, rho: float) -> np.ndarray:
    """Rescale w so its dominant eigenvalue magnitude equals rho."""
    sr = spectral_radius(w)
    if sr < 1e-12:
        raise ZeroSpectrum("spectral radius below 1e-12; cannot rescale")
    return w * (rho / sr)


def init_esn(cfg: EsnConfig, rng: np.random.Generator | None = None) -> Esn:
    """Build the reservoir: topology, spectral scaling, input matrix, mask."""
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    network = generate_network(cfg.topology, rng)
    w_rec = scale_spectral_radius(network.weights, cfg.spec_rad)

    w_in = rng.uniform(-1.0, 1.0, size=(cfg.n, cfg.input_dim))
    n_in = cfg.n_input_neurons
    if cfg.injection == "hub":
        deg = node_degrees(network)
        # stable sort on -degree: equal degrees break toward the lower index
        order = np.argsort(-deg, kind="stable")
        chosen = order[:n_in]
    else:
        chosen = rng.choice(cfg.n, size=n_in, replace=False)
    mask = np.zeros(cfg.n, dtype=bool)
    mask[chosen] = True
    w_in[~mask] = 0.0
    return Esn(w_in=w_in, w_rec=w_rec, input_mask=mask, network=network, config=cfg)


def step(esn: Esn, state: np.ndarray, inp: np.ndarray) -> np.ndarray:
    """One update: tanh(W_in u + W_rec s)."""
    return np.tanh(esn.w_in @ np.atleast_1d(inp) + esn.w_rec @ state)


def harvest(esn: Esn, inputs: np.ndarray, s0: np.ndarray | None = None) -> np.ndarray:
    """Drive the reservoir with an input sequence; stack the states.

    Row t of the result is the state after presenting input row t.
    """
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim == 1:
        inputs = inputs[:, None]
    if inputs.shape[1] != esn.config.input_dim:
        raise DimensionMismatch(
            f"inputs have dim {inputs.shape[1]}, expected {esn.config.input_dim}"
        )
    t_len = inputs.shape[0]
    states = np.empty((t_len, esn.n))
    s = np.zeros(esn.n) if s0 is None else np.asarray(s0, dtype=float)
    for t in range(t_len):
        s = np.tanh(esn.w_in @ inputs[t] + esn.w_rec @ s)
        states[t] = s
    return states


def fit_readout(states: np.ndarray, targets: np.ndarray, washout: int = 0) -> np.ndarray:
    """Minimum-norm least-squares readout on the harvested states.

    Rows before ``washout`` are dropped.  Singular values below
    1e-10 * sigma_max are treated as zero, which coincides with
    (S^T S)^{-1} S^T Y whenever that inverse exists.
    """
    states = np.asarray(states, dtype=float)
    targets = np.asarray(targets, dtype=float)
    squeeze = targets.ndim == 1
    if squeeze:
        targets = targets[:, None]
    if states.shape[0] != targets.shape[0]:
        raise DimensionMismatch(
            f"{states.shape[0]} state rows vs {targets.shape[0]} target rows"
        )
    if states.shape[0] - washout < 1:
        raise DimensionMismatch("washout leaves no rows to fit")
    s, y = states[washout:], targets[washout:]
    w_out, *_ = np.linalg.lstsq(s, y, rcond=1e-10)
    return w_out[:, 0] if squeeze else w_out


def predict(esn: Esn, w_out: np.ndarray, inputs: np.ndarray,
            s0: np.ndarray | None = None) -> np.ndarray:
    """Harvest then apply the readout at every timestep."""
    return harvest(esn, inputs, s0) @ w_out


def fit_subset_readout(states: np.ndarray, targets: np.ndarray,
                       subset: np.ndarray, washout: int = 0) -> np.ndarray:
    """Readout restricted to the given state columns."""
    subset = np.asarray(subset)
    if subset.dtype == bool:
        subset = np.flatnonzero(subset)
    if subset.size == 0:
        raise EmptySubset("subset readout needs at least one neuron")
    return fit_readout(np.asarray(states)[:, subset], targets, washout)


def normalized_readout_weights(w_out: np.ndarray, states: np.ndarray) -> np.ndarray:
    """Per-neuron readout importance, magnitude-corrected.

    |w_out_i| times the summed absolute state of neuron i over time; for
    multi-output readouts the L2 norm of row i stands in for |w_out_i|.
    """
    w_out = np.asarray(w_out, dtype=float)
    states = np.asarray(states, dtype=float)
    mag = np.abs(w_out) if w_out.ndim == 1 else np.linalg.norm(w_out, axis=1)
    if mag.shape[0] != states.shape[1]:
        raise DimensionMismatch("readout rows must match state columns")
    return mag * np.abs(states).sum(axis=0)


def pearson(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson correlation coefficient of two equal-length vectors."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise DimensionMismatch("need two equal-length vectors of size >= 2")
    xc, yc = x - x.mean(), y - y.mean()
    sx, sy = np.sqrt((xc ** 2).sum()), np.sqrt((yc ** 2).sum())
    if sx == 0.0 or sy == 0.0:
        raise ConstantVector("correlation undefined for a constant vector")
    return float((xc * yc).sum() / (sx * sy))


def degree_weight_correlation(w_norm: np.ndarray, degrees: np.ndarray) -> float:
    """Pearson correlation between normalized readout weight and degree."""
    return pearson(w_norm, degrees)


def esn_to_dict(esn: Esn) -> dict:
    rows, cols = np.nonzero(esn.w_in)
    cfg = asdict(esn.config)
    cfg["topology"] = asdict(esn.config.topology)
    return {
        "config": cfg,
        "network": network_to_dict(esn.network),
        "w_in": [[int(i), int(j), float(esn.w_in[i, j])] for i, j in zip(rows, cols)],
        "input_mask": esn.input_mask.astype(int).tolist(),
        "spec_rad": esn.config.spec_rad,
    }


def esn_from_dict(doc: dict) -> Esn:
    cfg_doc = dict(doc["config"])
    cfg_doc["topology"] = TopologyConfig(**cfg_doc["topology"])
    cfg = EsnConfig(**cfg_doc)
    network = network_from_dict(doc["network"])
    w_rec = scale_spectral_radius(network.weights, cfg.spec_rad)
    w_in = np.zeros((cfg.n, cfg.input_dim))
    for i, j, w in doc["w_in"]:
        w_in[int(i), int(j)] = float(w)
    mask = np.asarray(doc["input_mask"], dtype=bool)
    return Esn(w_in=w_in, w_rec=w_rec, input_mask=mask, network=network, config=cfg)


def save_esn(esn: Esn, path) -> None:
    with open(path, "w") as fh:
        json.dump(esn_to_dict(esn), fh)


def load_esn(path) -> Esn:
    with open(path) as fh:
        return esn_from_dict(json.load(fh))
