"""Randomized cluster trees, portals, and cut-probability estimation."""

import numpy as np
import pytest

from doubling2ecss.hierarchy import (
    LEAF_EXP,
    PartitionParams,
    assign_portals,
    build_cluster_tree,
    estimate_cut_probability,
    validate_cluster_tree,
)
from doubling2ecss.metric import MetricInstance


def random_instance(n, seed=0):
    rng = np.random.default_rng(seed)
    return MetricInstance.euclidean(rng.random((n, 2)) * 10)


@pytest.fixture(scope="module")
def tree_and_instance():
    inst = random_instance(25, seed=1)
    pp = PartitionParams.for_instance(inst, epsilon=0.25, seed=7)
    tree = build_cluster_tree(inst, pp)
    assign_portals(tree)
    return inst, tree


def test_tree_validates(tree_and_instance):
    inst, tree = tree_and_instance
    assert validate_cluster_tree(tree, inst) == []


def test_root_spans_everything(tree_and_instance):
    inst, tree = tree_and_instance
    assert sorted(tree.root.members) == list(range(inst.n))


def test_leaves_are_singletons(tree_and_instance):
    _, tree = tree_and_instance
    leaves = [tree.clusters[c] for c in tree.levels[-1]]
    assert all(c.level == LEAF_EXP and len(c.members) == 1 for c in leaves)
    assert sorted(m for c in leaves for m in c.members) == sorted(tree.root.members)


def test_levels_are_nested(tree_and_instance):
    _, tree = tree_and_instance
    for row in tree.levels[1:]:
        for cid in row:
            c = tree.clusters[cid]
            parent = tree.clusters[c.parent]
            assert set(c.members) <= set(parent.members)
            assert cid in parent.children


def test_parent_portal_survives_in_child(tree_and_instance):
    _, tree = tree_and_instance
    for row in tree.levels[1:]:
        for cid in row:
            c = tree.clusters[cid]
            parent = tree.clusters[c.parent]
            inherited = set(parent.portals) & set(c.members)
            assert inherited <= set(c.portals)


def test_portals_are_members(tree_and_instance):
    _, tree = tree_and_instance
    for c in tree.clusters.values():
        assert set(c.portals) <= set(c.members)
        assert c.portals  # at least the seed/center


def test_same_seed_same_tree():
    inst = random_instance(15, seed=4)
    pp = PartitionParams.for_instance(inst, seed=11)
    a = build_cluster_tree(inst, pp)
    b = build_cluster_tree(inst, pp)
    assert a.to_json() == b.to_json()


def test_different_seed_usually_differs():
    inst = random_instance(20, seed=4)
    a = build_cluster_tree(inst, PartitionParams.for_instance(inst, seed=1))
    b = build_cluster_tree(inst, PartitionParams.for_instance(inst, seed=2))
    assert a.to_json() != b.to_json()


def test_cut_probability_monotone_in_distance():
    # Close pairs should be cut at most about as often as far pairs.
    inst = random_instance(40, seed=8)
    pp = PartitionParams.for_instance(inst, seed=0)
    d = inst.dmatrix
    flat = [(d[u, v], u, v) for u in range(inst.n) for v in range(u + 1, inst.n)]
    flat.sort()
    _, cu, cv = flat[0]
    _, fu, fv = flat[-1]
    level = 1
    p_close = estimate_cut_probability(inst, pp, cu, cv, level, trials=300)
    p_far = estimate_cut_probability(inst, pp, fu, fv, level, trials=300)
    assert 0.0 <= p_close <= p_far + 0.1 and p_far <= 1.0
