"""Spanning trees, bridges, certification, and Euler-tour shortcutting."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doubling2ecss.graphs import (
    certify_2ecss,
    connected_components,
    edge_set_weight,
    find_bridges,
    minimum_spanning_tree,
    norm_edge,
    shortcut_euler_tour,
    solution_from_edges,
)
from doubling2ecss.metric import MetricInstance


def random_instance(n, seed=0):
    rng = np.random.default_rng(seed)
    return MetricInstance.euclidean(rng.random((n, 2)) * 10)


def test_mst_square():
    inst = MetricInstance.euclidean([[0, 0], [1, 0], [1, 1], [0, 1]])
    edges, w = minimum_spanning_tree(inst)
    assert len(edges) == 3
    assert w == pytest.approx(3.0)


def test_mst_on_subset():
    inst = random_instance(10)
    edges, w = minimum_spanning_tree(inst, subset=[0, 3, 7])
    assert len(edges) == 2
    assert all(u in (0, 3, 7) and v in (0, 3, 7) for u, v in edges)
    assert w > 0


def test_connected_components():
    comps = connected_components([(0, 1), (2, 3)], 5)
    assert sorted(map(sorted, comps)) == [[0, 1], [2, 3], [4]]


def test_find_bridges_path_vs_cycle():
    path = [(0, 1), (1, 2), (2, 3)]
    assert find_bridges(path, 4) == {(0, 1), (1, 2), (2, 3)}
    cycle = path + [(0, 3)]
    assert find_bridges(cycle, 4) == set()


def test_certify_cycle_is_2ecss():
    cert = certify_2ecss([(0, 1), (1, 2), (2, 0)], 3)
    assert cert["spanning"] and cert["bridgeless"]


def test_certify_tree_has_bridges():
    cert = certify_2ecss([(0, 1), (1, 2)], 3)
    assert cert["spanning"] and not cert["bridgeless"]


def test_certify_disconnected():
    cert = certify_2ecss([(0, 1)], 3)
    assert not cert["spanning"]


def exhaustive_2ec(edges, n):
    """Definition check: connected, spans all n, and stays connected after
    removing any single edge."""
    edges = list(edges)
    if len(connected_components(edges, n)) != 1:
        return False
    touched = {x for e in edges for x in e}
    if touched != set(range(n)):
        return False
    for e in edges:
        rest = [f for f in edges if f != e]
        if len(connected_components(rest, n)) != 1:
            return False
    return True


@given(st.integers(0, 1000), st.integers(3, 6))
@settings(max_examples=80, deadline=None)
def test_certify_matches_definition(seed, n):
    rng = np.random.default_rng(seed)
    all_edges = list(itertools.combinations(range(n), 2))
    mask = rng.random(len(all_edges)) < 0.55
    edges = [e for e, m in zip(all_edges, mask) if m]
    cert = certify_2ecss(edges, n)
    assert (cert["spanning"] and cert["bridgeless"]) == exhaustive_2ec(edges, n)


def test_norm_edge():
    assert norm_edge(3, 1) == (1, 3)
    assert norm_edge(1, 3) == (1, 3)


def test_solution_from_edges_small_n_infeasible():
    inst = MetricInstance.euclidean([[0, 0], [1, 0]])
    sol = solution_from_edges(inst, [(0, 1)])
    assert not sol.feasible


def test_shortcut_euler_tour_doubled_tree():
    inst = random_instance(8, seed=3)
    tree_edges, tree_w = minimum_spanning_tree(inst)
    doubled = list(tree_edges) * 2
    tour = shortcut_euler_tour(inst, doubled)
    # A Hamiltonian cycle on all points, no heavier than the doubled tree.
    assert len(tour) == inst.n
    cert = certify_2ecss(tour, inst.n)
    assert cert["spanning"] and cert["bridgeless"]
    assert edge_set_weight(inst, tour) <= 2 * tree_w + 1e-9


def test_shortcut_rejects_odd_degrees():
    inst = random_instance(4)
    with pytest.raises(ValueError):
        shortcut_euler_tour(inst, [(0, 1), (1, 2)])
