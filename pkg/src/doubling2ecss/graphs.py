"""Weighted graphs over metric points: MST, bridges, 2-ECSS certification,
Euler-tour shortcutting."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .metric import MetricInstance

Edge = tuple[int, int]


def norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def edge_set_weight(instance: MetricInstance, edges: Iterable[Edge]) -> float:
    d = instance.dmatrix
    return float(sum(d[u, v] for u, v in edges))


@dataclass
class SubgraphSolution:
    edges: frozenset[Edge]
    weight: float
    feasible: bool
    certificate: dict = field(default_factory=dict)

    def to_json(self, instance_name: str = "", seed: int = 0, params: dict | None = None) -> dict:
        return {
            "instance": instance_name,
            "edges": sorted([list(e) for e in self.edges]),
            "weight": self.weight,
            "feasible": self.feasible,
            "seed": seed,
            "params": params or {},
        }


def minimum_spanning_tree(instance: MetricInstance, subset: Sequence[int] | None = None) -> tuple[list[Edge], float]:
    """Prim's MST over the complete metric graph on `subset`.

    Ties are broken by lexicographic (u, v) so the edge set is deterministic.
    """
    pts = sorted(set(range(instance.n) if subset is None else subset))
    if not pts:
        raise ValueError("subset must be non-empty")
    if len(pts) == 1:
        return [], 0.0
    d = instance.dmatrix
    idx = np.asarray(pts)
    in_tree = np.zeros(len(pts), dtype=bool)
    best = np.full(len(pts), np.inf)
    best_from = np.full(len(pts), -1, dtype=int)
    in_tree[0] = True
    best_row = d[idx[0]][idx]
    best = best_row.copy()
    best_from[:] = 0
    best[0] = np.inf
    edges: list[Edge] = []
    total = 0.0
    for _ in range(len(pts) - 1):
        # Lexicographic tie-break: among minimal candidates pick smallest
        # (source id, target id) pair.
        m = best.min()
        cands = np.flatnonzero(np.abs(best - m) <= 1e-12)
        pick = min(cands, key=lambda j: (min(pts[best_from[j]], pts[j]), max(pts[best_from[j]], pts[j])))
        u, v = pts[best_from[pick]], pts[pick]
        edges.append(norm_edge(u, v))
        total += float(d[u, v])
        in_tree[pick] = True
        best[pick] = np.inf
        row = d[idx[pick]][idx]
        for j in range(len(pts)):
            if not in_tree[j] and row[j] < best[j] - 1e-12:
                best[j] = row[j]
                best_from[j] = pick
    return sorted(edges), total


def mst_weight(instance: MetricInstance, subset: Sequence[int] | None = None) -> float:
    return minimum_spanning_tree(instance, subset)[1]


def _adjacency(edges: Iterable[Edge], n: int) -> list[list[tuple[int, int]]]:
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for i, (u, v) in enumerate(edges):
        adj[u].append((v, i))
        adj[v].append((u, i))
    return adj


def connected_components(edges: Iterable[Edge], n: int) -> list[list[int]]:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    comps: dict[int, list[int]] = {}
    for x in range(n):
        comps.setdefault(find(x), []).append(x)
    return list(comps.values())


def find_bridges(edges: Iterable[Edge], n: int) -> set[Edge]:
    """Bridges via iterative low-link DFS; parallel edges are never bridges."""
    edge_list = list(edges)
    adj = _adjacency(edge_list, n)
    visited = [False] * n
    tin = [0] * n
    low = [0] * n
    timer = 0
    bridges: set[Edge] = set()
    for start in range(n):
        if visited[start]:
            continue
        stack: list[tuple[int, int, int]] = [(start, -1, 0)]  # (node, parent edge idx, next child pos)
        while stack:
            node, pedge, pos = stack.pop()
            if pos == 0:
                visited[node] = True
                tin[node] = low[node] = timer
                timer += 1
            if pos < len(adj[node]):
                stack.append((node, pedge, pos + 1))
                nxt, eidx = adj[node][pos]
                if eidx == pedge:
                    continue
                if visited[nxt]:
                    low[node] = min(low[node], tin[nxt])
                else:
                    stack.append((nxt, eidx, 0))
            else:
                if pedge != -1:
                    u, v = edge_list[pedge]
                    par = u if v == node else v
                    low[par] = min(low[par], low[node])
                    if low[node] > tin[par]:
                        bridges.add(norm_edge(u, v))
    # Parallel edges cancel bridge status.
    from collections import Counter

    counts = Counter(norm_edge(u, v) for u, v in edge_list)
    return {e for e in bridges if counts[e] == 1}


def certify_2ecss(edges: Iterable[Edge], n: int) -> dict[str, bool]:
    """Certificate: spanning (connected, touches all n points) and bridgeless."""
    edge_list = list(edges)
    comps = connected_components(edge_list, n)
    touched = {x for u, v in edge_list for x in (u, v)}
    spanning = len(comps) == 1 and (n <= 1 or touched == set(range(n)))
    bridgeless = not find_bridges(edge_list, n)
    return {"spanning": spanning, "bridgeless": bridgeless}


def solution_from_edges(instance: MetricInstance, edges: Iterable[Edge]) -> SubgraphSolution:
    es = frozenset(norm_edge(u, v) for u, v in edges)
    cert = certify_2ecss(es, instance.n)
    feasible = cert["spanning"] and cert["bridgeless"] and instance.n >= 3
    return SubgraphSolution(edges=es, weight=edge_set_weight(instance, es), feasible=feasible, certificate=cert)


def shortcut_euler_tour(instance: MetricInstance, multigraph_edges: Sequence[Edge]) -> list[Edge]:
    """Hamiltonian cycle from a connected even-degree multigraph: Euler tour,
    then first-visit shortcutting. Triangle inequality keeps the weight from
    increasing."""
    edge_list = list(multigraph_edges)
    if not edge_list:
        raise ValueError("empty multigraph")
    verts = sorted({x for e in edge_list for x in e})
    deg: dict[int, int] = {}
    for u, v in edge_list:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    if any(c % 2 for c in deg.values()):
        raise ValueError("multigraph has odd-degree vertices; not Eulerian")
    comps = [c for c in connected_components(edge_list, instance.n) if len(c) > 1 or c[0] in deg]
    touched_comps = [c for c in comps if any(x in deg for x in c)]
    if len(touched_comps) != 1:
        raise ValueError("multigraph is not connected")

    # Hierholzer.
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in verts}
    for i, (u, v) in enumerate(edge_list):
        adj[u].append((v, i))
        adj[v].append((u, i))
    for v in adj:
        adj[v].sort()
    used = [False] * len(edge_list)
    stack = [verts[0]]
    circuit: list[int] = []
    it_pos = {v: 0 for v in verts}
    while stack:
        v = stack[-1]
        advanced = False
        while it_pos[v] < len(adj[v]):
            nxt, eidx = adj[v][it_pos[v]]
            it_pos[v] += 1
            if not used[eidx]:
                used[eidx] = True
                stack.append(nxt)
                advanced = True
                break
        if not advanced:
            circuit.append(stack.pop())
    # First-visit shortcut.
    seen: set[int] = set()
    order: list[int] = []
    for v in circuit:
        if v not in seen:
            seen.add(v)
            order.append(v)
    if len(order) == 1:
        return []
    if len(order) == 2:
        return [norm_edge(order[0], order[1])]
    cycle = [norm_edge(order[i], order[(i + 1) % len(order)]) for i in range(len(order))]
    return cycle
