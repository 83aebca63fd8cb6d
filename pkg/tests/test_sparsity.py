"""Sparsity scanning and the sparse/dense decomposition."""

import numpy as np

from doubling2ecss.hierarchy import PartitionParams, assign_portals, build_cluster_tree
from doubling2ecss.metric import MetricInstance
from doubling2ecss.properties import make_dense_blob_instance
from doubling2ecss.sparsity import (
    SparsityParams,
    decompose_sparse_dense,
    find_sparsity_violation,
    max_q_star,
)


def tree_for(inst, seed=0):
    pp = PartitionParams.for_instance(inst, epsilon=0.25, seed=seed)
    tree = build_cluster_tree(inst, pp)
    assign_portals(tree)
    return pp, tree


def test_defaults_are_astronomical():
    p = SparsityParams.defaults(n=30, s=2.0, epsilon=0.1, k=2)
    assert p.q > 1e4
    assert p.q_prime > p.q
    assert 0 < p.delta < p.epsilon


def test_uniform_scatter_scans_clean():
    rng = np.random.default_rng(0)
    inst = MetricInstance.euclidean(rng.random((20, 2)) * 100)
    pp, tree = tree_for(inst)
    sp = SparsityParams(q=max_q_star(inst, tree) + 1.0, epsilon=0.25, k=pp.k)
    assert find_sparsity_violation(inst, tree, sp) is None
    rep = decompose_sparse_dense(inst, tree, sp)
    assert rep.violating is None
    assert sorted(rep.sparse_part) == list(range(inst.n))
    assert rep.dense_part == []


def test_blob_instance_violates_and_decomposes():
    inst = make_dense_blob_instance(seed=0)
    pp, tree = tree_for(inst)
    sp = SparsityParams(q=2.0, epsilon=0.25, k=pp.k)
    viol = find_sparsity_violation(inst, tree, sp)
    assert viol is not None
    rep = decompose_sparse_dense(inst, tree, sp)
    assert rep.violating is not None
    assert rep.violating["q_star"] > sp.q
    sparse, dense = set(rep.sparse_part), set(rep.dense_part)
    assert sparse | dense == set(range(inst.n))
    assert not sparse & dense
    assert dense  # the blob lands in the dense part


def test_dense_part_contains_the_blob():
    inst = make_dense_blob_instance(seed=3, n_scatter=14, side=5)
    pp, tree = tree_for(inst, seed=2)
    rep = decompose_sparse_dense(inst, tree, SparsityParams(q=2.0, epsilon=0.25, k=pp.k))
    blob_ids = set(range(14, inst.n))
    assert blob_ids <= set(rep.dense_part)


def test_report_json_shape():
    inst = make_dense_blob_instance(seed=1)
    pp, tree = tree_for(inst)
    rep = decompose_sparse_dense(inst, tree, SparsityParams(q=2.0, epsilon=0.25, k=pp.k))
    rows = rep.to_json()
    assert isinstance(rows, list) and rows
    assert all("q_star" in r for r in rows)
