"""Randomized hierarchical clustering partitions with portal nets.

Distances are normalized so the minimum interpoint distance is 1 before
building; cluster radii are stored in normalized units and de-normalized in
dumps. Levels are indexed by their scale exponent i (scale s^i): the root sits
at the largest exponent, exponent 0 is the finest geometric level, and a final
leaf level of singletons is kept at exponent -1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .metric import MetricInstance, build_net, estimate_doubling_dimension

LEAF_EXP = -1


@dataclass
class PartitionParams:
    k: int
    s: float
    num_levels: int
    epsilon: float
    seed: int = 0
    portal_alpha_factor: float = 0.0

    @classmethod
    def for_instance(
        cls,
        instance: MetricInstance,
        epsilon: float = 0.1,
        k: int | None = None,
        s: float | None = None,
        seed: int = 0,
        portal_alpha_factor: float | None = None,
        c: int = 32,
    ) -> "PartitionParams":
        if k is None:
            k = max(1, estimate_doubling_dimension(instance))
        n = instance.n
        if s is None:
            s = max(2.0, math.log(max(n, 2)) ** (1.0 / (c * k)))
        aspect = instance.stats().aspect_ratio
        num_levels = max(1, math.ceil(math.log(max(aspect, 1.0)) / math.log(s))) + 1
        if portal_alpha_factor is None:
            portal_alpha_factor = epsilon / (4.0 * num_levels)
        return cls(k=k, s=s, num_levels=num_levels, epsilon=epsilon, seed=seed,
                   portal_alpha_factor=portal_alpha_factor)

    def to_json(self) -> dict:
        return {
            "k": self.k, "s": self.s, "num_levels": self.num_levels,
            "epsilon": self.epsilon, "seed": self.seed,
            "portal_alpha_factor": self.portal_alpha_factor,
        }


@dataclass
class Cluster:
    cid: int
    level: int  # scale exponent; LEAF_EXP for singleton leaves
    center: int
    radius: float  # normalized units
    members: tuple[int, ...]
    parent: int | None = None
    children: list[int] = field(default_factory=list)
    portals: list[int] = field(default_factory=list)


class ClusterTree:
    def __init__(self, instance: MetricInstance, params: PartitionParams,
                 norm_scale: float, top_exp: int):
        self.instance = instance
        self.params = params
        self.norm_scale = norm_scale  # multiply normalized distances by this to recover raw
        self.top_exp = top_exp
        self.clusters: dict[int, Cluster] = {}
        self.levels: list[list[int]] = []  # coarse -> fine, last row is the leaf level
        self.level_exps: list[int] = []
        self.norm_dmatrix: np.ndarray | None = None

    def row_of_exp(self, exp: int) -> int:
        return self.level_exps.index(exp)

    def clusters_at(self, exp: int) -> list[Cluster]:
        return [self.clusters[c] for c in self.levels[self.row_of_exp(exp)]]

    def cluster_of(self, point: int, exp: int) -> Cluster:
        for cid in self.levels[self.row_of_exp(exp)]:
            if point in self.clusters[cid]._member_set:  # type: ignore[attr-defined]
                return self.clusters[cid]
        raise KeyError(f"point {point} not found at level {exp}")

    @property
    def root(self) -> Cluster:
        return self.clusters[self.levels[0][0]]

    def scale(self, exp: int) -> float:
        return 0.0 if exp == LEAF_EXP else self.params.s ** exp

    def to_json(self) -> dict:
        def enc(c: Cluster) -> dict:
            return {
                "id": c.cid, "level": c.level, "center": c.center,
                "radius": c.radius * self.norm_scale,
                "members": list(c.members), "portals": list(c.portals),
                "children": [enc(self.clusters[ch]) for ch in c.children],
            }
        return {"params": self.params.to_json(), "top_exp": self.top_exp,
                "norm_scale": self.norm_scale, "root": enc(self.root)}

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1))


def _sample_radius(scale: float, k: int, rng: np.random.Generator) -> float:
    """Truncated exponential on [scale, 2*scale], density proportional to
    2^((8k/scale) * r), sampled by inverse CDF."""
    lam = 8.0 * k * math.log(2.0) / scale
    u = float(rng.random())
    return scale + math.log1p(u * (2.0 ** (8 * k) - 1.0)) / lam


def _partition_level(dn: np.ndarray, parent_label: np.ndarray, scale: float,
                     k: int, rng: np.random.Generator) -> tuple[np.ndarray, list[int], list[float]]:
    """One level of the randomized partition: permutation order over points,
    each unassigned point becomes a center with a sampled radius and captures
    the unassigned points of its own parent cluster within that radius."""
    n = dn.shape[0]
    label = np.full(n, -1, dtype=int)
    centers: list[int] = []
    radii: list[float] = []
    perm = rng.permutation(n)
    for p in perm:
        p = int(p)
        if label[p] != -1:
            continue
        r = _sample_radius(scale, k, rng)
        cid = len(centers)
        capture = (label == -1) & (parent_label == parent_label[p]) & (dn[p] <= r)
        label[capture] = cid
        centers.append(p)
        radii.append(r)
    return label, centers, radii


def build_cluster_tree(instance: MetricInstance, params: PartitionParams,
                       rng: np.random.Generator | None = None) -> ClusterTree:
    if rng is None:
        rng = np.random.default_rng(params.seed)
    n = instance.n
    stats = instance.stats()
    norm_scale = stats.min_interpoint if n >= 2 else 1.0
    dn = instance.dmatrix / norm_scale if norm_scale > 0 else instance.dmatrix.copy()
    aspect = stats.aspect_ratio
    s = params.s
    top_exp = max(0, math.ceil(math.log(max(aspect, 1.0)) / math.log(s)))
    while s ** top_exp < aspect:  # guard against rounding at the boundary
        top_exp += 1

    tree = ClusterTree(instance, params, norm_scale, top_exp)
    tree.norm_dmatrix = dn
    next_id = 0

    def add(level: int, center: int, radius: float, members: np.ndarray,
            parent: int | None) -> Cluster:
        nonlocal next_id
        c = Cluster(cid=next_id, level=level, center=center, radius=radius,
                    members=tuple(int(m) for m in members), parent=parent)
        c._member_set = set(c.members)  # type: ignore[attr-defined]
        tree.clusters[c.cid] = c
        if parent is not None:
            tree.clusters[parent].children.append(c.cid)
        next_id += 1
        return c

    # Root: one cluster holding everything.
    root_perm = rng.permutation(n)
    root_center = int(root_perm[0])
    root_radius = _sample_radius(s ** top_exp, params.k, rng)
    root = add(top_exp, root_center, root_radius, np.arange(n), None)
    tree.levels.append([root.cid])
    tree.level_exps.append(top_exp)

    parent_label = np.zeros(n, dtype=int)
    parent_ids = {0: root.cid}
    for exp in range(top_exp - 1, -1, -1):
        label, centers, radii = _partition_level(dn, parent_label, s ** exp, params.k, rng)
        row: list[int] = []
        new_ids: dict[int, int] = {}
        for cid_local, (center, radius) in enumerate(zip(centers, radii)):
            members = np.flatnonzero(label == cid_local)
            parent = parent_ids[int(parent_label[members[0]])]
            c = add(exp, center, radius, members, parent)
            row.append(c.cid)
            new_ids[cid_local] = c.cid
        tree.levels.append(row)
        tree.level_exps.append(exp)
        parent_label = label
        parent_ids = new_ids

    # Leaf level: singletons.
    row = []
    for p in range(n):
        parent = parent_ids[int(parent_label[p])]
        c = add(LEAF_EXP, p, 0.0, np.array([p]), parent)
        row.append(c.cid)
    tree.levels.append(row)
    tree.level_exps.append(LEAF_EXP)
    return tree


def validate_cluster_tree(tree: ClusterTree, instance: MetricInstance | None = None) -> list[str]:
    """Empty list iff partition conditions, nesting, and radius containment hold."""
    if instance is None:
        instance = tree.instance
    n = instance.n
    dn = tree.norm_dmatrix
    if dn is None:
        stats = instance.stats()
        dn = instance.dmatrix / (stats.min_interpoint or 1.0)
    violations: list[str] = []
    all_points = set(range(n))
    for row, exp in zip(tree.levels, tree.level_exps):
        seen: set[int] = set()
        for cid in row:
            c = tree.clusters[cid]
            mset = set(c.members)
            if seen & mset:
                violations.append(f"disjointness: level {exp} point(s) {sorted(seen & mset)} duplicated")
            seen |= mset
            if c.radius > 0 or len(c.members) > 1:
                bad = [p for p in c.members if dn[c.center, p] > c.radius + 1e-9]
                if bad:
                    violations.append(f"radius: cluster {cid} members {bad} outside ball")
        if seen != all_points:
            violations.append(f"cover: level {exp} misses {sorted(all_points - seen)}")
    root = tree.root
    if set(root.members) != all_points:
        violations.append("root: does not contain all points")
    for cid in tree.levels[-1]:
        if len(tree.clusters[cid].members) != 1:
            violations.append(f"leaves: cluster {cid} is not a singleton")
    for c in tree.clusters.values():
        if c.children:
            child_members = [m for ch in c.children for m in tree.clusters[ch].members]
            if sorted(child_members) != sorted(c.members):
                violations.append(f"nesting: children of {c.cid} do not partition it")
        if c.parent is not None and c.cid not in tree.clusters[c.parent].children:
            violations.append(f"parent-link: {c.cid}")
    return violations


def assign_portals(tree: ClusterTree, params: PartitionParams | None = None) -> dict[int, list[int]]:
    """Greedy portal nets per cluster, threaded top-down: a parent portal is
    seeded into its child's net, so a portal at level i stays a portal at every
    finer level of the clusters containing it. Seed spacing exceeds the child
    alpha, so the seeded net is still a verified alpha-net."""
    if params is None:
        params = tree.params
    instance = tree.instance
    # Nets are built on normalized distances; reuse the instance with alpha scaled back.
    scale = tree.norm_scale
    portal_map: dict[int, list[int]] = {}
    for row, exp in zip(tree.levels, tree.level_exps):
        for cid in row:
            c = tree.clusters[cid]
            if exp == LEAF_EXP or len(c.members) == 1:
                c.portals = [c.members[0] if len(c.members) == 1 else c.center]
                portal_map[cid] = list(c.portals)
                continue
            alpha = params.portal_alpha_factor * tree.scale(exp) * scale
            seeds: list[int] = []
            if c.parent is not None:
                mset = set(c.members)
                seeds = [p for p in tree.clusters[c.parent].portals if p in mset]
            c.portals = build_net(instance, c.members, alpha, seeds=seeds)
            portal_map[cid] = list(c.portals)
    return portal_map


def partition_labels(instance: MetricInstance, params: PartitionParams,
                     rng: np.random.Generator, down_to_exp: int = 0) -> dict[int, np.ndarray]:
    """Fast path for Monte Carlo estimates: per-exponent cluster labels only,
    drawn with the same RNG stream order as build_cluster_tree."""
    n = instance.n
    stats = instance.stats()
    norm_scale = stats.min_interpoint if n >= 2 else 1.0
    dn = instance.dmatrix / norm_scale
    s = params.s
    aspect = stats.aspect_ratio
    top_exp = max(0, math.ceil(math.log(max(aspect, 1.0)) / math.log(s)))
    while s ** top_exp < aspect:
        top_exp += 1
    rng.permutation(n)  # root permutation
    _sample_radius(s ** top_exp, params.k, rng)  # root radius
    labels = {top_exp: np.zeros(n, dtype=int)}
    parent_label = labels[top_exp]
    for exp in range(top_exp - 1, down_to_exp - 1, -1):
        label, _, _ = _partition_level(dn, parent_label, s ** exp, params.k, rng)
        labels[exp] = label
        parent_label = label
    return labels


def estimate_cut_probability(instance: MetricInstance, params: PartitionParams,
                             u: int, v: int, level: int, trials: int,
                             rng: np.random.Generator | None = None) -> float:
    """Monte Carlo fraction of independently drawn partitions in which u and v
    fall into different clusters at scale exponent `level`."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if u == v:
        return 0.0
    if rng is None:
        rng = np.random.default_rng(params.seed)
    cut = 0
    for _ in range(trials):
        labels = partition_labels(instance, params, rng, down_to_exp=max(level, 0))
        exp = level if level in labels else min(labels)
        if labels[exp][u] != labels[exp][v]:
            cut += 1
    return cut / trials


def cut_probability_table(instance: MetricInstance, params: PartitionParams,
                          pairs: list[tuple[int, int]], level: int, trials: int,
                          rng: np.random.Generator | None = None) -> np.ndarray:
    """Cut counts for many pairs over a shared set of sampled partitions."""
    if rng is None:
        rng = np.random.default_rng(params.seed)
    counts = np.zeros(len(pairs), dtype=int)
    for _ in range(trials):
        labels = partition_labels(instance, params, rng, down_to_exp=max(level, 0))
        exp = level if level in labels else min(labels)
        lab = labels[exp]
        for i, (u, v) in enumerate(pairs):
            if lab[u] != lab[v]:
                counts[i] += 1
    return counts
