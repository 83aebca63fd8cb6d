"""Boundary-crossing transformations: patching crossings down to at most two
per portal group, and rerouting edge sets so every cluster boundary is crossed
at portals."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .graphs import Edge, edge_set_weight, minimum_spanning_tree, norm_edge
from .hierarchy import LEAF_EXP, ClusterTree
from .metric import MetricInstance


@dataclass
class PatchStats:
    groups_patched: int
    removed: int
    added_weight: float
    bound: float  # 4 * w(MST(P)) over the crossing endpoints
    max_group_after: int
    parity_preserved: bool


# Module-level log so harness runs can audit every patch call made anywhere in
# the pipeline (acceptance checks read and reset this).
PATCH_LOG: list[PatchStats] = []


def reset_patch_log() -> None:
    PATCH_LOG.clear()


def crossing_edges(edges: Iterable[Edge], members: set[int]) -> list[Edge]:
    return [e for e in edges if (e[0] in members) != (e[1] in members)]


def _dfs_order(points: list[int], instance: MetricInstance) -> list[int]:
    """Preorder of the metric MST over `points`; consecutive pairing along this
    order costs at most twice the MST weight."""
    if len(points) <= 2:
        return list(points)
    sub_edges, _ = minimum_spanning_tree(instance, points)
    adj: dict[int, list[int]] = {p: [] for p in points}
    for u, v in sub_edges:
        adj[u].append(v)
        adj[v].append(u)
    for p in adj:
        adj[p].sort()
    order: list[int] = []
    seen: set[int] = set()
    stack = [points[0]]
    while stack:
        x = stack.pop()
        if x in seen:
            continue
        seen.add(x)
        order.append(x)
        stack.extend(reversed(adj[x]))
    return order


def patch_crossings(instance: MetricInstance, edges: Iterable[Edge],
                    members: Iterable[int]) -> tuple[frozenset[Edge], PatchStats]:
    """Reduce boundary crossings of the cluster `members` to at most two per
    portal group (crossings sharing an inside attachment point).

    Kept crossings per group: two if the group is even, one if odd, so degree
    parities are preserved; removed crossings are paired consecutively along
    the MST preorder of their outside endpoints and replaced by the pair
    edges. Added weight is asserted against 4 * w(MST(P)) with P the crossing
    endpoints.
    """
    mset = set(members)
    eset = set(norm_edge(u, v) for u, v in edges)
    crossings = crossing_edges(eset, mset)
    groups: dict[int, list[Edge]] = {}
    for e in crossings:
        inside = e[0] if e[0] in mset else e[1]
        groups.setdefault(inside, []).append(e)

    p_points = sorted({x for e in crossings for x in e})
    bound = 4.0 * (minimum_spanning_tree(instance, p_points)[1] if len(p_points) > 1 else 0.0)
    d = instance.dmatrix
    added = 0.0
    removed = 0
    patched_groups = 0
    parity_ok = True
    for inside, group in groups.items():
        if len(group) <= 2:
            continue
        patched_groups += 1
        keep = 2 if len(group) % 2 == 0 else 1
        group_sorted = sorted(group, key=lambda e: (d[e[0], e[1]], e))
        drop = group_sorted[keep:]
        outs = [e[0] if e[1] in mset else e[1] for e in drop]
        order = _dfs_order(sorted(set(outs)), instance)
        pos = {p: i for i, p in enumerate(order)}
        outs.sort(key=lambda p: pos[p])
        for e in drop:
            eset.discard(e)
            removed += 1
        for i in range(0, len(outs) - 1, 2):
            a, b = outs[i], outs[i + 1]
            if a == b:
                parity_ok = False
                continue
            e = norm_edge(a, b)
            if e in eset:
                # Simple edge sets cannot hold a parallel copy; parity is lost
                # for this pair but the weight bound still holds.
                parity_ok = False
                continue
            eset.add(e)
            added += float(d[a, b])

    post = crossing_edges(eset, mset)
    post_groups: dict[int, int] = {}
    for e in post:
        inside = e[0] if e[0] in mset else e[1]
        post_groups[inside] = post_groups.get(inside, 0) + 1
    max_after = max(post_groups.values(), default=0)
    stats = PatchStats(groups_patched=patched_groups, removed=removed,
                       added_weight=added, bound=bound,
                       max_group_after=max_after, parity_preserved=parity_ok)
    assert added <= bound + 1e-9, f"patch added {added} > bound {bound}"
    assert max_after <= 2, f"patch left a group with {max_after} crossings"
    PATCH_LOG.append(stats)
    return frozenset(eset), stats


def _point_cluster_maps(tree: ClusterTree) -> dict[int, dict[int, int]]:
    maps = getattr(tree, "_point_cluster_maps", None)
    if maps is None:
        maps = {}
        for row, exp in zip(tree.levels, tree.level_exps):
            m: dict[int, int] = {}
            for cid in row:
                for p in tree.clusters[cid].members:
                    m[p] = cid
            maps[exp] = m
        tree._point_cluster_maps = maps  # type: ignore[attr-defined]
    return maps


def _separating_exps(tree: ClusterTree, x: int, y: int) -> list[int]:
    """Non-leaf scale exponents at which x and y lie in different clusters,
    finest first."""
    maps = _point_cluster_maps(tree)
    out = []
    for exp in tree.level_exps:
        if exp == LEAF_EXP:
            continue
        if maps[exp][x] != maps[exp][y]:
            out.append(exp)
    out.sort()
    return out


def well_behaved_violations(tree: ClusterTree, edges: Iterable[Edge]) -> list[tuple[Edge, int, int]]:
    """Boundary crossings not at portals: (edge, level, offending inside
    endpoint) for every cluster cut by an edge whose inside endpoint is not one
    of the cluster's portals."""
    maps = _point_cluster_maps(tree)
    bad = []
    for e in edges:
        x, y = e
        for exp in _separating_exps(tree, x, y):
            for z in (x, y):
                c = tree.clusters[maps[exp][z]]
                if z not in c.portals:
                    bad.append((e, exp, z))
    return bad


def make_well_behaved(instance: MetricInstance, tree: ClusterTree,
                      edges: Iterable[Edge], epsilon: float) -> frozenset[Edge]:
    """Reroute every edge cut by cluster balls so all residual crossings are at
    portals, ascending level by level through each side's nearest portals and
    crossing at the coarsest separating level. Output weight is asserted
    against (1 + 6 eps) times the input weight."""
    maps = _point_cluster_maps(tree)
    d = instance.dmatrix
    in_edges = [norm_edge(u, v) for u, v in edges]
    out: set[Edge] = set()
    for e in in_edges:
        x, y = e
        seps = _separating_exps(tree, x, y)
        if not seps:
            out.add(e)
            continue
        ok = all(z in tree.clusters[maps[exp][z]].portals
                 for exp in seps for z in (x, y))
        if ok:
            out.add(e)
            continue
        top = seps[-1]
        ends = []
        for z in (x, y):
            p = z
            for exp in range(0, top + 1):
                if exp not in maps:
                    continue
                c = tree.clusters[maps[exp][p]]
                if p in c.portals:
                    continue
                nxt = min(c.portals, key=lambda q: (d[p, q], q))
                if nxt != p:
                    out.add(norm_edge(p, nxt))
                    p = nxt
            ends.append(p)
        if ends[0] != ends[1]:
            out.add(norm_edge(ends[0], ends[1]))
    w_in = edge_set_weight(instance, set(in_edges))
    w_out = edge_set_weight(instance, out)
    assert w_out <= (1.0 + 6.0 * epsilon) * w_in + 1e-9, (
        f"well-behaved weight {w_out} exceeds (1+6eps) * {w_in}")
    return frozenset(out)
