import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hubnet import topology
from hubnet.errors import AllMassZero
from hubnet.topology import (
    Network,
    TopologyConfig,
    distance_constraint,
    generate_network,
    load_network,
    neurogenetic_constraint,
    prune,
    prune_probabilities,
    sample_coordinates,
    save_network,
    target_edge_count,
)


def test_config_rejects_bad_values():
    with pytest.raises(ValueError):
        TopologyConfig(n=-1)
    with pytest.raises(ValueError):
        TopologyConfig(n=10, density=0.0)
    with pytest.raises(ValueError):
        TopologyConfig(n=10, density=1.5)
    with pytest.raises(ValueError):
        TopologyConfig(n=10, mode="scale-free")
    with pytest.raises(ValueError):
        TopologyConfig(n=10, alpha=-1.0)
    with pytest.raises(ValueError):
        TopologyConfig(n=10, lambda_dc=-0.1)
    with pytest.raises(ValueError):
        TopologyConfig(n=10, lambda_dc=0.0, lambda_nc=0.0, lambda_reg=0.0)
    with pytest.raises(ValueError):
        TopologyConfig(n=10, weight_sigma2=0.0)


def test_random_mode_allows_all_zero_lambdas():
    cfg = TopologyConfig(n=10, mode="random",
                         lambda_dc=0.0, lambda_nc=0.0, lambda_reg=0.0)
    net = generate_network(cfg)
    assert net.edge_count == target_edge_count(10, cfg.density)


def test_distance_constraint_is_euclidean():
    coords = np.array([[0.0, 0.0, 0.0], [3.0, 4.0, 0.0]])
    d = distance_constraint(coords)
    assert d[0, 0] == 0.0
    assert d[0, 1] == pytest.approx(5.0)
    assert d[1, 0] == pytest.approx(5.0)


def test_neurogenetic_constraint_is_index_sum():
    c = neurogenetic_constraint(4)
    assert c[0, 0] == 0.0
    assert c[1, 2] == 3.0
    assert c[3, 3] == 6.0
    assert np.array_equal(c, c.T)


def test_prune_probabilities_sum_to_one_with_zero_diagonal():
    cfg = TopologyConfig(n=40, seed=3)
    rng = np.random.default_rng(3)
    coords = sample_coordinates(cfg.n, rng)
    c_d = distance_constraint(coords)
    c_n = neurogenetic_constraint(cfg.n)
    r = rng.standard_normal((cfg.n, cfg.n))
    p = prune_probabilities(c_d, c_n, r, cfg)
    assert abs(p.sum() - 1.0) < 1e-12
    assert np.all(np.diagonal(p) == 0.0)
    assert np.all(p >= 0.0)


def test_prune_probabilities_raise_when_all_mass_vanishes():
    cfg = TopologyConfig(n=5, lambda_dc=1.0, lambda_nc=0.0, lambda_reg=0.0)
    zeros = np.zeros((5, 5))
    with pytest.raises(AllMassZero):
        prune_probabilities(zeros, zeros, zeros, cfg)


def test_lambda_scale_invariance_is_bit_exact():
    # doubling every lambda rescales the mass by an exact power of two,
    # which the final normalization divides back out bit-for-bit
    rng = np.random.default_rng(11)
    coords = sample_coordinates(30, rng)
    c_d = distance_constraint(coords)
    c_n = neurogenetic_constraint(30)
    r = rng.standard_normal((30, 30))
    a = TopologyConfig(n=30, lambda_dc=0.5, lambda_nc=0.25, lambda_reg=0.125)
    b = TopologyConfig(n=30, lambda_dc=2.0, lambda_nc=1.0, lambda_reg=0.5)
    pa = prune_probabilities(c_d, c_n, r, a)
    pb = prune_probabilities(c_d, c_n, r, b)
    assert np.array_equal(pa, pb)


@pytest.mark.parametrize("n,density", [(10, 0.2), (25, 0.05), (50, 0.5), (7, 1.0)])
def test_exact_edge_count(n, density):
    net = generate_network(TopologyConfig(n=n, density=density, seed=1))
    assert net.edge_count == target_edge_count(n, density)
    assert np.all(np.diagonal(net.weights) == 0.0)


def test_random_mode_exact_edge_count():
    net = generate_network(TopologyConfig(n=40, density=0.1, mode="random", seed=7))
    assert net.edge_count == target_edge_count(40, 0.1)


def test_same_seed_reproduces_identical_network():
    cfg = TopologyConfig(n=60, seed=42)
    a = generate_network(cfg)
    b = generate_network(cfg)
    assert np.array_equal(a.weights, b.weights)
    assert np.array_equal(a.coords, b.coords)


def test_different_seeds_differ():
    a = generate_network(TopologyConfig(n=60, seed=1))
    b = generate_network(TopologyConfig(n=60, seed=2))
    assert not np.array_equal(a.weights, b.weights)


def test_degenerate_sizes():
    for n in (0, 1):
        net = generate_network(TopologyConfig(n=n))
        assert net.weights.shape == (n, n)
        assert net.edge_count == 0


def test_prune_uniform_fallback_hits_exact_count():
    # only one edge carries deletion mass but three must go: the deficit
    # falls back to uniform deletion over the survivors
    n = 4
    rng = np.random.default_rng(0)
    dense = np.ones((n, n))
    p = np.zeros((n, n))
    p[0, 1] = 1.0
    out = prune(dense, p, density=0.75, rng=rng)
    off = ~np.eye(n, dtype=bool)
    assert np.count_nonzero(out[off]) == target_edge_count(n, 0.75)
    assert out[0, 1] == 0.0  # the only weighted edge is always deleted


def test_prune_deletes_high_mass_edges_preferentially():
    n = 30
    cfg = TopologyConfig(n=n, density=0.3, seed=5)
    rng = np.random.default_rng(cfg.seed)
    coords = sample_coordinates(n, rng)
    dense = rng.normal(0.0, 1.0, size=(n, n))
    np.fill_diagonal(dense, 0.0)
    c_d = distance_constraint(coords)
    c_n = neurogenetic_constraint(n)
    r = rng.standard_normal((n, n))
    p = prune_probabilities(c_d, c_n, r, cfg)
    kept_mass = []
    for seed in range(20):
        out = prune(dense, p, cfg.density, np.random.default_rng(seed))
        off = ~np.eye(n, dtype=bool)
        kept_mass.append(p[off][out[off] != 0.0].mean())
    overall = p[~np.eye(n, dtype=bool)].mean()
    # surviving edges should carry well below average deletion mass
    assert np.mean(kept_mass) < 0.8 * overall


def test_hub_mode_concentrates_degree_on_low_indices():
    from hubnet.netmetrics import node_degrees

    net = generate_network(TopologyConfig(n=200, density=0.1, seed=9))
    deg = node_degrees(net)
    assert deg[:50].mean() > 1.5 * deg[150:].mean()


def test_save_load_round_trip(tmp_path):
    net = generate_network(TopologyConfig(n=25, density=0.3, seed=8))
    path = tmp_path / "net.json"
    save_network(net, path)
    loaded = load_network(path)
    assert np.array_equal(loaded.weights, net.weights)
    assert np.allclose(loaded.coords, net.coords)
    assert loaded.config == net.config
    # the file is plain JSON
    with open(path) as fh:
        doc = json.load(fh)
    assert doc["n"] == 25


@settings(max_examples=25, deadline=None)
@given(n=st.integers(min_value=2, max_value=60),
       density=st.floats(min_value=0.01, max_value=1.0),
       seed=st.integers(min_value=0, max_value=2**31 - 1))
def test_edge_count_property(n, density, seed):
    net = generate_network(TopologyConfig(n=n, density=density, seed=seed))
    assert net.edge_count == target_edge_count(n, density)
