"""Benchmark data: Mackey-Glass, NARMA10, and column-scanned MNIST.

Mackey-Glass is Euler-discretized (dt = 1) from constant history with a
discarded transient, and min-max normalized into the open interval
(-1, 1).  NARMA10 inputs are uniform on [0, 0.5] and left unnormalized;
divergent draws are regenerated.  MNIST images are read from the IDX
byte format and scanned column by column over 28 timesteps.
"""

from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadMagic,
    CountMismatch,
    DimensionMismatch,
    IndexOutOfRange,
    InsufficientLength,
    RegenerationExhausted,
    TruncatedFile,
)

__all__ = [
    "MackeyGlassConfig",
    "NarmaConfig",
    "Dataset",
    "MnistData",
    "mackey_glass",
    "narma10",
    "narma_recursion",
    "make_one_step_dataset",
    "load_mnist",
    "mnist_sequences",
]

NORM_EPS = 1e-6


@dataclass(frozen=True)
class MackeyGlassConfig:
    length: int = 5000
    tau: int = 17
    beta_m: float = 0.2
    gamma_m: float = 0.1
    k: float = 10.0
    dt: float = 1.0
    transient: int = 1000
    x0: float = 1.2
    seed: int = 0  # reserved; the dynamics are deterministic

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("length must be >= 1")
        if self.tau < 1:
            raise ValueError("tau must be >= 1")
        if self.transient < 0:
            raise ValueError("transient must be nonnegative")


@dataclass(frozen=True)
class NarmaConfig:
    length: int = 5000
    l: int = 10
    alpha_n: float = 0.3
    beta_n: float = 0.05
    gamma_n: float = 1.5
    delta_n: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("length must be >= 1")
        if self.l < 1:
            raise ValueError("l must be >= 1")


@dataclass
class Dataset:
    """Aligned input/target sequences plus provenance."""

    inputs: np.ndarray
    targets: np.ndarray
    kind: str = "one_step"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise ValueError("inputs and targets must have equal row counts")


@dataclass
class MnistData:
    images: np.ndarray  # count x 28 x 28, floats in [0, 1]
    labels: np.ndarray  # count, ints 0..9

    @property
    def count(self) -> int:
        return self.images.shape[0]


def mackey_glass(cfg: MackeyGlassConfig) -> tuple[np.ndarray, np.ndarray]:
    """Generate the series; returns (raw, normalized-to-(-1,1)) copies.

    Update: x(t+1) = x(t) + dt * (beta * x(t-tau) / (1 + x(t-tau)^k)
    - gamma * x(t)), with constant history x0 and the first ``transient``
    steps discarded.
    """
    total = cfg.transient + cfg.length
    # x[tau + t] holds x(t); indices below tau carry the constant history
    x = np.full(cfg.tau + 1 + total, cfg.x0)
    for t in range(total):
        xt = x[cfg.tau + t]
        xd = x[t]  # x(t - tau)
        x[cfg.tau + t + 1] = xt + cfg.dt * (
            cfg.beta_m * xd / (1.0 + xd ** cfg.k) - cfg.gamma_m * xt
        )
    raw = x[cfg.tau + 1 + cfg.transient:]
    lo, hi = raw.min(), raw.max()
    if hi > lo:
        scale = (2.0 - 2.0 * NORM_EPS) / (hi - lo)
        norm = -1.0 + NORM_EPS + (raw - lo) * scale
    else:
        norm = np.zeros_like(raw)
    return raw, norm


def narma_recursion(u: np.ndarray, cfg: NarmaConfig) -> np.ndarray:
    """NARMA target series for a given input sequence.

    x(t) = alpha*x(t-1) + beta*x(t-1)*sum_{i=1..l} x(t-i)
         + gamma*u(t-l)*u(t-1) + delta, with x = 0 and u = 0 before t = 0.
    """
    u = np.asarray(u, dtype=float)
    t_len = u.shape[0]
    x = np.zeros(t_len)  # x(t) = 0 for the first l warmup steps
    # overflow is an expected outcome here: divergent series are detected
    # and regenerated by the caller, so the warning is just noise
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(cfg.l, t_len):
            x[t] = (
                cfg.alpha_n * x[t - 1]
                + cfg.beta_n * x[t - 1] * x[t - cfg.l:t].sum()
                + cfg.gamma_n * u[t - cfg.l] * u[t - 1]
                + cfg.delta_n
            )
            if not np.isfinite(x[t]):
                break
    return x


def narma10(cfg: NarmaConfig, rng: np.random.Generator | None = None,
            max_attempts: int = 100) -> Dataset:
    """NARMA dataset: inputs u(t) ~ U[0, 0.5], targets x(t+1).

    A draw whose targets exceed 1e3 in magnitude is discarded and redrawn
    from the same stream, up to ``max_attempts`` times.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    for _ in range(max_attempts):
        u = rng.uniform(0.0, 0.5, size=cfg.length + 1)
        x = narma_recursion(u, cfg)
        if np.all(np.isfinite(x)) and np.abs(x).max() <= 1e3:
            return Dataset(
                inputs=u[: cfg.length, None],
                targets=x[1: cfg.length + 1, None],
                kind="one_step",
                meta={"task": "narma10", "config": cfg},
            )
    raise RegenerationExhausted(
        f"{max_attempts} consecutive divergent NARMA draws; check the parameters"
    )


def make_one_step_dataset(series: np.ndarray, n_train: int,
                          n_test: int) -> tuple[Dataset, Dataset]:
    """Split a series into teacher-forced one-step-ahead train/test pairs.

    Pair t is (series[t] -> series[t+1]); train takes the first n_train
    pairs and test the next n_test.  At evaluation time the test harvest
    should continue from the final training state.
    """
    series = np.asarray(series, dtype=float).reshape(-1)
    if n_train < 0 or n_test < 0 or n_train + n_test > series.shape[0] - 1:
        raise InsufficientLength(
            f"need n_train + n_test + 1 <= {series.shape[0]} values"
        )
    inputs = series[:-1, None]
    targets = series[1:, None]
    train = Dataset(inputs=inputs[:n_train], targets=targets[:n_train])
    test = Dataset(inputs=inputs[n_train: n_train + n_test],
                   targets=targets[n_train: n_train + n_test])
    return train, test


def _open_maybe_gz(path):
    path = str(path)
    return gzip.open(path, "rb") if path.endswith(".gz") else open(path, "rb")


def _read_exact(fh, count: int, what: str) -> bytes:
    data = fh.read(count)
    if len(data) != count:
        raise TruncatedFile(f"{what}: expected {count} bytes, got {len(data)}")
    return data


IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801


def load_mnist(images_path, labels_path) -> MnistData:
    """Parse IDX image/label files (gzip transparent); pixels scaled to [0, 1]."""
    with _open_maybe_gz(images_path) as fh:
        magic, count, rows, cols = struct.unpack(">IIII", _read_exact(fh, 16, "image header"))
        if magic != IMAGE_MAGIC:
            raise BadMagic(f"image file magic {magic:#010x}, expected {IMAGE_MAGIC:#010x}")
        if (rows, cols) != (28, 28):
            raise DimensionMismatch(f"expected 28x28 images, got {rows}x{cols}")
        payload = _read_exact(fh, count * rows * cols, "image payload")
        images = np.frombuffer(payload, dtype=np.uint8).reshape(count, rows, cols)
    with _open_maybe_gz(labels_path) as fh:
        magic, label_count = struct.unpack(">II", _read_exact(fh, 8, "label header"))
        if magic != LABEL_MAGIC:
            raise BadMagic(f"label file magic {magic:#010x}, expected {LABEL_MAGIC:#010x}")
        labels = np.frombuffer(_read_exact(fh, label_count, "label payload"), dtype=np.uint8)
    if count != label_count:
        raise CountMismatch(f"{count} images vs {label_count} labels")
    return MnistData(images=images.astype(float) / 255.0,
                     labels=labels.astype(np.int64))


def mnist_sequences(data: MnistData, indices) -> list[tuple[np.ndarray, np.ndarray]]:
    """Column-scan selected images into (28x28 input sequence, one-hot label).

    Timestep t presents image column t; the same one-hot label is the
    target at every step.
    """
    out = []
    for idx in np.asarray(indices, dtype=int):
        if idx < 0 or idx >= data.count:
            raise IndexOutOfRange(f"image index {idx} outside 0..{data.count - 1}")
        seq = data.images[idx].T.copy()  # row t = column t of the image
        onehot = np.zeros(10)
        onehot[data.labels[idx]] = 1.0
        out.append((seq, onehot))
    return out
