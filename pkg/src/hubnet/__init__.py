"""Hub-structured reservoir networks: generation, metrics, ESN benchmarks."""

from . import bench, errors, netmetrics, reservoir, tasks, topology
from .bench import TrialSpec, run_experiment, run_trial
from .reservoir import Esn, EsnConfig, init_esn
from .topology import Network, TopologyConfig, generate_network

__version__ = "0.1.0"

__all__ = [
    "bench",
    "errors",
    "netmetrics",
    "reservoir",
    "tasks",
    "topology",
    "TopologyConfig",
    "Network",
    "generate_network",
    "EsnConfig",
    "Esn",
    "init_esn",
    "TrialSpec",
    "run_trial",
    "run_experiment",
    "__version__",
]
