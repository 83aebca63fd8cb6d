"""End-to-end 2-ECSS solver: randomized cluster trees, sparse/dense
decomposition, portal DP per part, greedy repair, and a baseline fallback.

Each solve draws `best_of` independent cluster trees and keeps the cheapest
certified solution; with the fallback enabled the returned weight never
exceeds the doubled-MST baseline. All DP trials share one work pool, so a
solve's running time is bounded regardless of instance size.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .dp import DPCounters, NoFeasibleConfiguration, SolverParams, solve_sparse_dp
from .graphs import (
    Edge,
    SubgraphSolution,
    certify_2ecss,
    connected_components,
    edge_set_weight,
    find_bridges,
    minimum_spanning_tree,
    norm_edge,
    solution_from_edges,
)
from .hierarchy import PartitionParams, assign_portals, build_cluster_tree
from .metric import MetricInstance
from .oracles import double_mst_baseline
from .sparsity import SparsityParams, decompose_sparse_dense
from .transforms import patch_crossings


@dataclass
class RunReport:
    weight: float
    baseline_weight: float
    mst_weight: float
    feasible: bool
    seed: int
    params: dict
    sparsity: list = field(default_factory=list)
    dp: dict = field(default_factory=dict)
    wall_ms: float = 0.0

    def to_json(self) -> dict:
        return {
            "weight": self.weight, "baseline_weight": self.baseline_weight,
            "mst_weight": self.mst_weight, "feasible": self.feasible,
            "seed": self.seed, "params": self.params, "sparsity": self.sparsity,
            "dp": self.dp, "wall_ms": self.wall_ms,
        }


def repair_to_2ecss(instance: MetricInstance, edges: frozenset[Edge]) -> frozenset[Edge]:
    """Greedy repair: connect components with cheapest cross edges, then cover
    each bridge with the cheapest edge joining the two sides it separates."""
    n = instance.n
    d = instance.dmatrix
    eset = set(edges)
    while True:
        comps = connected_components(sorted(eset), n)
        if len(comps) <= 1:
            break
        comp_of = {}
        for i, comp in enumerate(comps):
            for v in comp:
                comp_of[v] = i
        best = None
        for u in range(n):
            for v in range(u + 1, n):
                if comp_of[u] != comp_of[v] and (u, v) not in eset:
                    cand = (float(d[u, v]), (u, v))
                    if best is None or cand < best:
                        best = cand
        eset.add(best[1])
    while True:
        bridges = find_bridges(sorted(eset), n)
        if not bridges:
            break
        bu, bv = min(bridges)
        # Sides of the bridge.
        side_edges = [e for e in eset if e != (bu, bv)]
        comps = connected_components(side_edges, n)
        side_of = {}
        for i, comp in enumerate(comps):
            for v in comp:
                side_of[v] = i
        best = None
        for u in range(n):
            for v in range(u + 1, n):
                if side_of[u] != side_of[v] and (u, v) not in eset:
                    cand = (float(d[u, v]), (u, v))
                    if best is None or cand < best:
                        best = cand
        if best is None:  # n == 2: no simple edge can cover the bridge
            break
        eset.add(best[1])
    return frozenset(eset)


def _patch_pass(instance: MetricInstance, tree, edges: frozenset[Edge],
                counters: DPCounters) -> frozenset[Edge]:
    """Patch clusters whose boundary is crossed more than twice per portal
    group, then repair; keep the result only if it is certified and no
    heavier."""
    out = edges
    for row in tree.levels[1:-1]:
        for cid in row:
            members = set(tree.clusters[cid].members)
            if len(members) < 2 or len(members) >= instance.n:
                continue
            per_inside: dict[int, int] = {}
            for u, v in out:
                if (u in members) != (v in members):
                    inside = u if u in members else v
                    per_inside[inside] = per_inside.get(inside, 0) + 1
            if not per_inside or max(per_inside.values()) <= 2:
                continue
            patched, _ = patch_crossings(instance, out, members)
            counters.patch_calls += 1
            repaired = repair_to_2ecss(instance, patched)
            cert = certify_2ecss(repaired, instance.n)
            if (cert["spanning"] and cert["bridgeless"]
                    and edge_set_weight(instance, repaired) <= edge_set_weight(instance, out) + 1e-12):
                out = repaired
    return out


def _map_edges(edges: frozenset[Edge], index: list[int]) -> frozenset[Edge]:
    return frozenset(norm_edge(index[u], index[v]) for u, v in edges)


def _dp_on_subset(instance: MetricInstance, subset: list[int], epsilon: float,
                  params: SolverParams, seed: int, counters: DPCounters,
                  incumbent: float | None = None) -> frozenset[Edge] | None:
    """Run the portal DP on an induced sub-metric; edges come back in the
    parent instance's indices. None when the caps leave nothing viable."""
    idx = sorted(subset)
    sub = instance.submetric(idx)
    if sub.n < 3:
        if sub.n == 2:
            return frozenset({norm_edge(idx[0], idx[1])})
        return frozenset()
    pp = PartitionParams.for_instance(sub, epsilon=epsilon, k=params.k,
                                      s=params.s, seed=seed)
    tree = build_cluster_tree(sub, pp)
    assign_portals(tree)
    bound = double_mst_baseline(sub).weight
    if incumbent is not None:
        bound = min(bound, incumbent)
    try:
        edges, _, _ = solve_sparse_dp(sub, tree, params, incumbent=bound,
                                      counters=counters)
    except NoFeasibleConfiguration:
        return None
    return _map_edges(edges, idx)


def solve_2ecss(instance: MetricInstance, params: SolverParams | None = None,
                seed: int = 0, _depth: int = 0) -> tuple[SubgraphSolution, RunReport]:
    """Best certified 2-ECSS over `best_of` randomized trees, with sparse/dense
    decomposition and baseline fallback."""
    if params is None:
        params = SolverParams()
    t0 = time.perf_counter()
    n = instance.n
    counters = DPCounters()
    sparsity_log: list[dict] = []
    mst_w = minimum_spanning_tree(instance)[1] if n >= 2 else 0.0

    if n < 3:
        sol = solution_from_edges(instance, frozenset(
            {norm_edge(0, 1)} if n == 2 else set()))
        report = RunReport(weight=sol.weight, baseline_weight=sol.weight,
                           mst_weight=mst_w, feasible=False, seed=seed,
                           params=params.to_json(),
                           wall_ms=(time.perf_counter() - t0) * 1e3)
        return sol, report

    baseline = double_mst_baseline(instance)
    best_edges = frozenset(baseline.edges)
    best_w = baseline.weight

    # One work pool for the whole solve; large instances get a smaller pool so
    # a solve stays interactive and falls back instead of grinding.
    pool = min(params.node_budget, 100_000 if n <= 12 else 12_000)
    if n > params.dp_size_cap:
        # The table caps leave the DP no realistic chance at this size; go
        # straight to the baseline instead of burning the pool.
        pool = 0
    run_params = SolverParams(**{**params.__dict__, "node_budget": pool})

    max_redraws = 10 * max(1, math.ceil(math.log2(max(n, 2))))
    trials = 0
    redraws = 0
    while trials < params.best_of and redraws <= max_redraws:
        if counters.configs_enumerated >= pool:
            break  # work pool exhausted; fall back rather than grind
        trial_seed = seed + 101 * (trials + redraws)
        pp = PartitionParams.for_instance(instance, epsilon=params.epsilon,
                                          k=params.k, s=params.s, seed=trial_seed)
        tree = build_cluster_tree(instance, pp)
        assign_portals(tree)

        sq = params.q if params.q is not None else SparsityParams.defaults(
            n, pp.s, params.epsilon, pp.k).q
        sp = SparsityParams(q=sq, epsilon=params.epsilon, k=pp.k)
        dec = decompose_sparse_dense(instance, tree, sp)
        sparsity_log.extend(dec.to_json())

        edges: frozenset[Edge] | None
        if dec.dense_part and dec.sparse_part and _depth < params.max_recursion:
            sparse_edges = _dp_on_subset(instance, dec.sparse_part, params.epsilon,
                                         run_params, trial_seed, counters)
            dense_sub = instance.submetric(sorted(dec.dense_part))
            dense_sol, dense_rep = solve_2ecss(
                dense_sub, SolverParams(**{**params.__dict__, "best_of": 1}),
                seed=trial_seed, _depth=_depth + 1)
            sparsity_log.extend(dense_rep.sparsity)
            dense_edges = _map_edges(dense_sol.edges, sorted(dec.dense_part))
            if sparse_edges is None:
                edges = None
            else:
                edges = repair_to_2ecss(instance, sparse_edges | dense_edges)
        else:
            edges = _dp_on_subset(instance, list(range(n)), params.epsilon,
                                  run_params, trial_seed, counters, incumbent=best_w)

        if edges is None:
            redraws += 1
            continue

        edges = _patch_pass(instance, tree, edges, counters)
        cert = certify_2ecss(edges, n)
        if cert["spanning"] and cert["bridgeless"]:
            w = edge_set_weight(instance, edges)
            if w < best_w - 1e-12:
                best_w = w
                best_edges = edges
        trials += 1

    if not params.fallback_baseline and best_edges == frozenset(baseline.edges) and trials == 0:
        raise NoFeasibleConfiguration("no tree produced a viable configuration")

    assert best_w >= mst_w - 1e-9, "2-ECSS lighter than its spanning tree"
    sol = solution_from_edges(instance, best_edges)
    report = RunReport(
        weight=sol.weight, baseline_weight=baseline.weight, mst_weight=mst_w,
        feasible=sol.feasible, seed=seed, params=params.to_json(),
        sparsity=sparsity_log,
        dp={"configs_enumerated": counters.configs_enumerated,
            "patch_calls": counters.patch_calls,
            "max_table_size": counters.max_table_size},
        wall_ms=(time.perf_counter() - t0) * 1e3,
    )
    return sol, report
