"""End-to-end solver: feasibility, baseline guarantee, repair, and reports."""

import numpy as np
import pytest

from doubling2ecss.dp import SolverParams
from doubling2ecss.graphs import certify_2ecss, find_bridges, minimum_spanning_tree
from doubling2ecss.metric import MetricInstance
from doubling2ecss.oracles import brute_force_2ecss, double_mst_baseline
from doubling2ecss.solver import repair_to_2ecss, solve_2ecss


def random_instance(n, seed=0, dim=2):
    rng = np.random.default_rng(seed)
    return MetricInstance.euclidean(rng.random((n, dim)) * 10)


@pytest.mark.parametrize("n,seed", [(5, 0), (9, 1), (14, 2), (30, 3), (55, 4)])
def test_solver_feasible_and_bounded(n, seed):
    inst = random_instance(n, seed=seed)
    sol, rep = solve_2ecss(inst, seed=seed)
    assert sol.feasible
    cert = certify_2ecss(sol.edges, n)
    assert cert["spanning"] and cert["bridgeless"]
    assert sol.weight <= rep.baseline_weight + 1e-9
    assert sol.weight >= rep.mst_weight - 1e-9


def test_solver_near_optimal_small():
    inst = random_instance(8, seed=7)
    sol, _ = solve_2ecss(inst, SolverParams(best_of=5), seed=7)
    opt = brute_force_2ecss(inst).weight
    assert sol.weight <= 1.25 * opt + 1e-9


def test_solver_deterministic_for_seed():
    inst = random_instance(12, seed=5)
    w1 = solve_2ecss(inst, seed=5)[0].weight
    w2 = solve_2ecss(inst, seed=5)[0].weight
    assert w1 == w2


def test_tiny_instances_infeasible_but_reported():
    for n in (1, 2):
        inst = random_instance(n, seed=0)
        sol, rep = solve_2ecss(inst)
        assert not sol.feasible
        assert not rep.feasible


def test_repair_connects_and_debridges():
    inst = random_instance(10, seed=3)
    tree_edges, _ = minimum_spanning_tree(inst)
    # Break the tree into two components, then repair.
    broken = frozenset(list(tree_edges)[:-1])
    fixed = repair_to_2ecss(inst, broken)
    cert = certify_2ecss(fixed, inst.n)
    assert cert["spanning"] and cert["bridgeless"]
    assert not find_bridges(fixed, inst.n)


def test_repair_idempotent_on_feasible():
    inst = random_instance(9, seed=8)
    base = frozenset(double_mst_baseline(inst).edges)
    assert repair_to_2ecss(inst, base) == base


def test_report_json_shape():
    inst = random_instance(10, seed=6)
    sol, rep = solve_2ecss(inst, seed=6)
    payload = rep.to_json()
    for key in ("weight", "baseline_weight", "mst_weight", "feasible",
                "seed", "params", "sparsity", "dp", "wall_ms"):
        assert key in payload
    assert payload["weight"] == pytest.approx(sol.weight)
    assert payload["dp"]["configs_enumerated"] >= 0


def test_large_instance_falls_back_fast():
    inst = random_instance(60, seed=2)
    sol, rep = solve_2ecss(inst, seed=2)
    assert sol.feasible
    assert sol.weight <= rep.baseline_weight + 1e-9
