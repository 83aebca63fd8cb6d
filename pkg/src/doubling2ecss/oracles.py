"""Desk-scale ground truth: exact 2-ECSS by branch and bound, Held-Karp TSP,
and the double-MST tour baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import (
    Edge,
    certify_2ecss,
    edge_set_weight,
    minimum_spanning_tree,
    norm_edge,
    shortcut_euler_tour,
)
from .metric import MetricInstance


class OracleRangeError(ValueError):
    """Instance size outside the oracle's supported range."""


@dataclass
class OracleResult:
    weight: float
    edges: frozenset[Edge]
    method: str


def brute_force_2ecss(instance: MetricInstance, max_n: int = 10) -> OracleResult:
    """Exact minimum-weight 2-ECSS by edge-subset branch and bound.

    Edges are scanned in ascending weight; branches are pruned by the
    degree-deficit lower bound and the incumbent. Ties between optimal edge
    sets are broken lexicographically.
    """
    n = instance.n
    if not 3 <= n <= max_n:
        raise OracleRangeError(f"brute_force_2ecss supports 3 <= n <= {max_n}, got {n}")
    d = instance.dmatrix
    all_edges = sorted(
        (norm_edge(u, v) for u in range(n) for v in range(u + 1, n)),
        key=lambda e: (d[e[0], e[1]], e),
    )
    m = len(all_edges)
    weights = [float(d[u, v]) for u, v in all_edges]
    # Incident edge positions per vertex, in scan order (hence ascending weight).
    incident: list[list[int]] = [[] for _ in range(n)]
    for i, (u, v) in enumerate(all_edges):
        incident[u].append(i)
        incident[v].append(i)

    # Initial incumbent: the double-MST tour (always feasible for n >= 3).
    start = double_mst_baseline(instance)
    best_weight = start.weight
    best_edges: frozenset[Edge] = start.edges

    deg = [0] * n
    chosen: list[int] = []

    def lower_bound(i: int, partial: float) -> float:
        lb = 0.0
        for v in range(n):
            need = 2 - deg[v]
            if need <= 0:
                continue
            got = 0
            for pos in incident[v]:
                if pos >= i:
                    lb += weights[pos]
                    got += 1
                    if got == need:
                        break
            if got < need:
                return float("inf")
        return partial + lb / 2.0

    def dfs(i: int, partial: float) -> None:
        nonlocal best_weight, best_edges
        if partial >= best_weight - 1e-12:
            if partial > best_weight + 1e-12:
                return
        if lower_bound(i, partial) > best_weight + 1e-12:
            return
        if i == m:
            if any(dv < 2 for dv in deg):
                return
            edges = frozenset(all_edges[j] for j in chosen)
            cert = certify_2ecss(edges, n)
            if cert["spanning"] and cert["bridgeless"]:
                better = partial < best_weight - 1e-12
                tie = abs(partial - best_weight) <= 1e-12 and sorted(edges) < sorted(best_edges)
                if better or tie:
                    best_weight = partial
                    best_edges = edges
            return
        u, v = all_edges[i]
        # Include first: edges come in ascending weight, so cheap structure is
        # explored before expensive alternatives.
        chosen.append(i)
        deg[u] += 1
        deg[v] += 1
        dfs(i + 1, partial + weights[i])
        deg[u] -= 1
        deg[v] -= 1
        chosen.pop()
        dfs(i + 1, partial)

    dfs(0, 0.0)
    return OracleResult(weight=best_weight, edges=best_edges, method="brute-2ecss")


def held_karp_tsp(instance: MetricInstance, max_n: int = 15) -> OracleResult:
    """Exact TSP by the bitmask subset DP; returns the optimal Hamiltonian cycle."""
    n = instance.n
    if not 3 <= n <= max_n:
        raise OracleRangeError(f"held_karp_tsp supports 3 <= n <= {max_n}, got {n}")
    d = instance.dmatrix
    full = 1 << n
    INF = float("inf")
    cost = np.full((full, n), INF)
    parent = np.full((full, n), -1, dtype=int)
    cost[1, 0] = 0.0
    for mask in range(1, full):
        if not mask & 1:
            continue
        for last in range(n):
            if not mask & (1 << last):
                continue
            c = cost[mask, last]
            if c == INF:
                continue
            for nxt in range(1, n):
                if mask & (1 << nxt):
                    continue
                nm = mask | (1 << nxt)
                nc = c + d[last, nxt]
                if nc < cost[nm, nxt] - 1e-15:
                    cost[nm, nxt] = nc
                    parent[nm, nxt] = last
    best = INF
    best_last = -1
    for last in range(1, n):
        total = cost[full - 1, last] + d[last, 0]
        if total < best - 1e-15:
            best = total
            best_last = last
    order = []
    mask, last = full - 1, best_last
    while last != -1:
        order.append(last)
        mask, last = mask ^ (1 << last), int(parent[mask, last])
    order.reverse()
    edges = frozenset(norm_edge(order[i], order[(i + 1) % n]) for i in range(n))
    return OracleResult(weight=float(best), edges=edges, method="held-karp-tsp")


def double_mst_baseline(instance: MetricInstance) -> OracleResult:
    """Classical tour baseline: double the MST, Euler tour, shortcut.
    The resulting Hamiltonian cycle is a feasible 2-ECSS of weight <= 2 MST."""
    n = instance.n
    if n < 3:
        raise OracleRangeError(f"double_mst_baseline needs n >= 3, got {n}")
    mst_edges, _ = minimum_spanning_tree(instance)
    doubled = list(mst_edges) + list(mst_edges)
    cycle = shortcut_euler_tour(instance, doubled)
    edges = frozenset(cycle)
    return OracleResult(weight=edge_set_weight(instance, edges), edges=edges, method="double-mst")
