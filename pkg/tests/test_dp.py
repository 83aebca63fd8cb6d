"""Portal DP: configurations, interface signatures, and exact-mode optimality."""

import numpy as np
import pytest

from doubling2ecss.dp import (
    CLOSED,
    NoFeasibleConfiguration,
    SolverParams,
    enumerate_configs,
    interface_signature,
    solve_sparse_dp,
)
from doubling2ecss.hierarchy import PartitionParams, assign_portals, build_cluster_tree
from doubling2ecss.metric import MetricInstance
from doubling2ecss.oracles import brute_force_2ecss


def random_instance(n, seed=0):
    rng = np.random.default_rng(seed)
    return MetricInstance.euclidean(rng.random((n, 2)) * 10)


def exact_solve(inst, seed=0):
    pp = PartitionParams.for_instance(inst, epsilon=0.25, seed=seed,
                                      portal_alpha_factor=0.0)
    tree = build_cluster_tree(inst, pp)
    assign_portals(tree)
    return solve_sparse_dp(inst, tree, SolverParams.exact_mode(inst.n))


def test_enumerate_configs_single_portal():
    cfgs = enumerate_configs(1, 2)
    assert len(cfgs) == 8


def test_enumerate_configs_respects_crossing_limit():
    for usage, _classes in enumerate_configs(2, 2):
        assert all(c <= 2 for c in usage)
        assert sum(usage) <= 2


def test_enumerate_configs_grows_with_portals():
    assert len(enumerate_configs(2, 2)) > len(enumerate_configs(1, 2))


def test_signature_closed_cycle():
    edges = frozenset({(0, 1), (1, 2), (2, 0)})
    sig = interface_signature(edges, {0, 1, 2}, {}, complete_ok=True)
    assert sig == CLOSED


def test_signature_open_when_stubs_remain():
    edges = frozenset({(0, 1), (1, 2), (2, 0)})
    sig = interface_signature(edges, {0, 1, 2}, {0: 2}, complete_ok=True)
    assert sig != CLOSED


def test_signature_anonymizes_interior_points():
    # Portal ids are part of the interface; interior labels are not.
    e1 = frozenset({(0, 1), (1, 2), (2, 0)})
    e2 = frozenset({(0, 5), (5, 6), (6, 0)})
    s1 = interface_signature(e1, {0, 1, 2}, {0: 1}, complete_ok=False)
    s2 = interface_signature(e2, {0, 5, 6}, {0: 1}, complete_ok=False)
    assert s1 == s2
    s3 = interface_signature(e2, {0, 5, 6}, {5: 1}, complete_ok=False)
    assert s3 != s1


@pytest.mark.parametrize("n,seed", [(4, 0), (5, 1), (6, 2), (6, 3), (7, 4)])
def test_exact_mode_matches_brute_force(n, seed):
    inst = random_instance(n, seed=seed)
    opt = brute_force_2ecss(inst).weight
    edges, w, _ = exact_solve(inst, seed=seed)
    assert w == pytest.approx(opt, abs=1e-9)
    assert len(edges) >= n  # a 2-ECSS has at least n edges


def test_exact_mode_deterministic():
    inst = random_instance(6, seed=11)
    _, w1, _ = exact_solve(inst, seed=11)
    _, w2, _ = exact_solve(inst, seed=11)
    assert w1 == w2


def test_infeasible_when_budget_exhausted():
    inst = random_instance(9, seed=0)
    pp = PartitionParams.for_instance(inst, epsilon=0.25, seed=0)
    tree = build_cluster_tree(inst, pp)
    assign_portals(tree)
    params = SolverParams(node_budget=1)
    with pytest.raises(NoFeasibleConfiguration):
        solve_sparse_dp(inst, tree, params)


def test_crossing_budget_cap():
    p = SolverParams(r_cap=6)
    assert p.crossing_budget(n=1000, k=2, s=2.0, q=10.0) <= 6
