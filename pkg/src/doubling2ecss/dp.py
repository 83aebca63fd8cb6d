"""Portal-respecting bottom-up dynamic programming for 2-ECSS over a cluster
tree.

Table keys are boundary interfaces: the multiset of crossing stubs per portal
together with the portal-labeled bridge forest of the partial edge set (which
portals sit in which two-edge-connected block, and how blocks are chained by
bridges). Two partial solutions with the same interface admit exactly the same
feasible completions, so keeping the cheapest per interface is lossless; caps
on crossings, portal usage, and table size make the practical mode tractable.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .graphs import Edge, norm_edge
from .hierarchy import ClusterTree
from .metric import MetricInstance


class NoFeasibleConfiguration(Exception):
    """The DP could not close the root under the configured caps."""


@dataclass
class SolverParams:
    epsilon: float = 0.1
    q: float | None = None
    r: int | None = None  # crossing limit per cluster; None derives min(theory, r_cap)
    r_cap: int = 6
    portal_cap: int = 8  # m: portals per cluster admitted to the DP
    max_portal_use: int = 2  # crossing multiplicity cap per portal
    best_of: int = 5
    fallback_baseline: bool = True
    k: int | None = None
    s: float | None = None
    max_table: int | None = 96
    max_conn_pairs: int | None = 10  # candidate inter-child connection edges per merge
    max_conn_edges: int | None = 3  # connection edges added in one merge step
    node_budget: int = 200_000  # signature evaluations per DP run before aborting
    dp_size_cap: int = 24  # points beyond which a solve goes straight to fallback
    max_recursion: int = 12

    def crossing_budget(self, n: int, k: int, s: float, q: float) -> int:
        if self.r is not None:
            return self.r
        # Theory value r' + r'' (astronomical for any realistic parameters),
        # clamped by the practical cap.
        eps = self.epsilon
        loglogn = math.log(max(math.log(max(n, 3)), 1.0001))
        r_short = 2.0 ** (4 * k) * 10.0 * q * k * max(loglogn / math.log(s), 0.0) + (2.0 * k / eps) ** k
        r_long = (s / eps) ** (2 * k)
        theory = r_short + r_long
        return int(min(theory, self.r_cap)) if theory < 10 ** 9 else self.r_cap

    @classmethod
    def exact_mode(cls, n: int, max_portal_use: int = 2) -> "SolverParams":
        """Exhaustive settings: every point a portal, crossing budget 2n, no
        enumeration caps. Used by the oracle-equivalence tests."""
        return cls(r=2 * n, portal_cap=n, max_portal_use=max_portal_use,
                   max_table=None, max_conn_pairs=None, max_conn_edges=None,
                   node_budget=10 ** 9)

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon, "q": self.q, "r": self.r, "r_cap": self.r_cap,
            "portal_cap": self.portal_cap, "max_portal_use": self.max_portal_use,
            "best_of": self.best_of, "fallback_baseline": self.fallback_baseline,
            "k": self.k, "s": self.s,
        }


@dataclass
class DPCounters:
    configs_enumerated: int = 0
    patch_calls: int = 0
    max_table_size: int = 0
    aborted: bool = False


# -- boundary interface ------------------------------------------------------

CLOSED = ("CLOSED",)


def _bridges_and_blocks(verts: list[int], edges: list[Edge]) -> tuple[set[Edge], dict[int, int]]:
    """Bridges plus a block id per vertex (2-edge-connected components)."""
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in verts}
    for i, (u, v) in enumerate(edges):
        adj[u].append((v, i))
        adj[v].append((u, i))
    tin: dict[int, int] = {}
    low: dict[int, int] = {}
    bridges: set[Edge] = set()
    timer = 0
    for start in verts:
        if start in tin:
            continue
        stack = [(start, -1, 0)]
        while stack:
            node, pedge, pos = stack.pop()
            if pos == 0:
                tin[node] = low[node] = timer
                timer += 1
            if pos < len(adj[node]):
                stack.append((node, pedge, pos + 1))
                nxt, eidx = adj[node][pos]
                if eidx == pedge:
                    continue
                if nxt in tin:
                    low[node] = min(low[node], tin[nxt])
                else:
                    stack.append((nxt, eidx, 0))
            else:
                if pedge != -1:
                    u, v = edges[pedge]
                    par = u if v == node else v
                    low[par] = min(low[par], low[node])
                    if low[node] > tin[par]:
                        bridges.add(norm_edge(u, v))
    # Blocks: union-find over non-bridge edges.
    parent = {v: v for v in verts}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        if norm_edge(u, v) not in bridges:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
    block = {v: find(v) for v in verts}
    return bridges, block


def _canonical_tree(adj: dict[int, list[int]], labels: dict[int, tuple]) -> tuple:
    """Canonical form of a labeled free tree (AHU rooted at the centre)."""
    nodes = list(adj)
    if len(nodes) == 1:
        return (labels[nodes[0]],)
    # Find centre(s) by leaf stripping.
    deg = {v: len(adj[v]) for v in nodes}
    layer = [v for v in nodes if deg[v] <= 1]
    remaining = len(nodes)
    alive = set(nodes)
    while remaining > 2:
        nxt = []
        for v in layer:
            alive.discard(v)
            remaining -= 1
            for w in adj[v]:
                if w in alive:
                    deg[w] -= 1
                    if deg[w] == 1:
                        nxt.append(w)
        layer = nxt
    centres = sorted(alive)

    def encode(root: int, parent: int | None) -> tuple:
        kids = sorted(encode(w, root) for w in adj[root] if w != parent)
        return (labels[root], tuple(kids))

    return min(encode(c, None) for c in centres)


def interface_signature(edges: frozenset[Edge], members: set[int],
                        stubs: dict[int, int], complete_ok: bool) -> tuple | None:
    """Canonical boundary interface, or None when no completion can ever make
    the partial solution 2-edge-connected and spanning.

    Dead states: a connected component without crossing stubs (it can never
    attach to the rest), or a bridge-forest leaf block without a stub (its
    bridge can never be covered). A fully closed state (single spanning
    component, bridgeless, no stubs) is only allowed when the merged members
    already cover the whole instance.
    """
    verts = sorted(members)
    edge_list = sorted(edges)
    # Components.
    parent = {v: v for v in verts}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edge_list:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    comps: dict[int, list[int]] = {}
    for v in verts:
        comps.setdefault(find(v), []).append(v)

    if not stubs:
        if (complete_ok and len(comps) == 1):
            bridges, _ = _bridges_and_blocks(verts, edge_list)
            return CLOSED if not bridges else None
        return None

    comp_sigs: list[tuple] = []
    comp_edges: dict[int, list[Edge]] = {r: [] for r in comps}
    for e in edge_list:
        comp_edges[find(e[0])].append(e)
    for root, cverts in comps.items():
        cstubs = {p: stubs[p] for p in cverts if p in stubs}
        if not cstubs:
            return None
        bridges, block = _bridges_and_blocks(cverts, comp_edges[root])
        # Block forest for this component.
        badj: dict[int, set[int]] = {}
        for v in cverts:
            badj.setdefault(block[v], set())
        for u, v in bridges:
            badj[block[u]].add(block[v])
            badj[block[v]].add(block[u])
        blabels: dict[int, list[tuple[int, int]]] = {b: [] for b in badj}
        for p, c in cstubs.items():
            blabels[block[p]].append((p, c))
        # Every leaf block must carry a stub, else its bridge is uncoverable.
        for b, nbrs in badj.items():
            if len(nbrs) <= 1 and not blabels[b]:
                if len(badj) > 1:
                    return None
        # Smooth stubless degree-2 blocks.
        changed = True
        while changed:
            changed = False
            for b in list(badj):
                if not blabels[b] and len(badj[b]) == 2:
                    a, c = sorted(badj[b])
                    badj[a].discard(b)
                    badj[c].discard(b)
                    badj[a].add(c)
                    badj[c].add(a)
                    del badj[b]
                    del blabels[b]
                    changed = True
        labels = {b: tuple(sorted(blabels[b])) for b in badj}
        adj_lists = {b: sorted(badj[b]) for b in badj}
        comp_sigs.append(_canonical_tree(adj_lists, labels))
    return tuple(sorted(comp_sigs))


# -- abstract configuration enumeration (spec surface + self-check) ----------

def enumerate_configs(portal_count: int, crossing_limit: int,
                      max_portal_use: int = 2) -> list[tuple]:
    """All distinct abstract boundary configurations for `portal_count`
    portals: per-portal usage in 0..max_portal_use summing to <= crossing
    limit, every set partition of the used stub slots into connectivity
    classes, and a satisfied / needs-second-connection flag per class.
    Configurations are deduplicated up to reordering of classes and of the
    identical slots within one portal."""
    if portal_count < 1:
        raise ValueError("portal_count must be >= 1")
    configs: set[tuple] = set()
    usage_ranges = [range(0, max_portal_use + 1)] * portal_count
    for usage in itertools.product(*usage_ranges):
        if sum(usage) > crossing_limit:
            continue
        slots = [p for p, c in enumerate(usage) for _ in range(c)]
        if not slots:
            configs.add((usage, ()))
            continue
        for part in _set_partitions(len(slots)):
            classes = []
            for cls in part:
                classes.append(tuple(sorted(slots[i] for i in cls)))
            for flags in itertools.product((0, 1), repeat=len(classes)):
                canon = tuple(sorted(zip(classes, flags)))
                configs.add((usage, canon))
    return sorted(configs)


def _set_partitions(n: int) -> Iterator[list[list[int]]]:
    if n == 0:
        yield []
        return
    if n == 1:
        yield [[0]]
        return
    for part in _set_partitions(n - 1):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [n - 1]] + part[i + 1:]
        yield part + [[n - 1]]


# -- DP tables ---------------------------------------------------------------

Entry = tuple[float, frozenset, tuple]  # (weight, edges, stubs as sorted items)


def _stub_items(stubs: dict[int, int]) -> tuple:
    return tuple(sorted(stubs.items()))


class _DPRun:
    def __init__(self, instance: MetricInstance, tree: ClusterTree,
                 params: SolverParams, incumbent: float, counters: DPCounters):
        self.instance = instance
        self.tree = tree
        self.params = params
        self.incumbent = incumbent
        self.counters = counters
        self.n = instance.n
        self.d = instance.dmatrix
        k = params.k or tree.params.k
        s = params.s or tree.params.s
        q = params.q if params.q is not None else (s / params.epsilon) ** (2 * k) * 2.0 ** (k * k)
        self.r = max(2, params.crossing_budget(self.n, k, s, q))
        self.inter_cap = 2 * self.r
        self._cands: dict[tuple, list] = {}
        # Half the nearest-neighbour distance per point: any edge (p, q) costs
        # at least nn_half[p] + nn_half[q], so w + sum(stub * nn_half) lower
        # bounds every completion in which all stubs get consumed.
        if self.n >= 2:
            dd = self.d.copy()
            np.fill_diagonal(dd, np.inf)
            self.nn_half = 0.5 * dd.min(axis=1)
        else:
            self.nn_half = None

    def potential(self, w: float, stubs: dict[int, int] | tuple) -> float:
        items = stubs.items() if isinstance(stubs, dict) else stubs
        return w + sum(c * float(self.nn_half[p]) for p, c in items)

    def _sig(self, edges: frozenset, members: set[int], stubs: dict[int, int]) -> tuple | None:
        self.counters.configs_enumerated += 1
        if self.counters.configs_enumerated > self.params.node_budget:
            self.counters.aborted = True
            raise NoFeasibleConfiguration("node budget exhausted")
        return interface_signature(edges, members, stubs, complete_ok=len(members) == self.n)

    def leaf_table(self, point: int) -> dict[tuple, Entry]:
        table: dict[tuple, Entry] = {}
        if self.n == 1:
            table[CLOSED] = (0.0, frozenset(), ())
            return table
        for c in range(2, min(self.params.max_portal_use, self.r) + 1):
            stubs = {point: c}
            sig = self._sig(frozenset(), {point}, stubs)
            if sig is not None:
                table[sig] = (0.0, frozenset(), _stub_items(stubs))
        return table

    def _cand_pairs(self, a_pts: tuple[int, ...], b_pts: tuple[int, ...]) -> list[tuple[float, Edge]]:
        """Candidate connection edges between two stub frontiers, cheapest
        first. The cap keeps the best partners of every stub point so no stub
        is left without a consumption option. Cached: the same frontiers recur
        across many table entries."""
        key = (a_pts, b_pts)
        cached = self._cands.get(key)
        if cached is not None:
            return cached
        all_pairs = sorted(
            ((float(self.d[p, q]), norm_edge(p, q)) for p in a_pts for q in b_pts),
            key=lambda t: (t[0], t[1]),
        )
        if self.params.max_conn_pairs is None or len(all_pairs) <= self.params.max_conn_pairs:
            cands = all_pairs
        else:
            keep: set[Edge] = set()
            best_of_point: dict[int, list[tuple[float, Edge]]] = {}
            for w, e in all_pairs:
                for x in e:
                    best_of_point.setdefault(x, [])
                    if len(best_of_point[x]) < 2:
                        best_of_point[x].append((w, e))
            for lst in best_of_point.values():
                keep.update(e for _, e in lst)
            for w, e in all_pairs:
                if len(keep) >= self.params.max_conn_pairs and e not in keep:
                    continue
                keep.add(e)
            cands = [t for t in all_pairs if t[1] in keep]
        self._cands[key] = cands
        return cands

    def _conn_subsets(self, a_stubs: dict[int, int], b_stubs: dict[int, int],
                      cands: list[tuple[float, Edge]], budget: float,
                      complete: bool) -> Iterator[tuple[list[Edge], float]]:
        """Connection edge sets between the two stub frontiers, respecting
        multiplicities; ordered exploration pruned by the completion lower
        bound. The edge-count cap is lifted on the merge that completes the
        instance, where closing may need to consume every remaining stub."""
        max_edges = None if complete else self.params.max_conn_edges
        rem_a = dict(a_stubs)
        rem_b = dict(b_stubs)
        chosen: list[Edge] = []
        nnh = self.nn_half

        def rec(i: int, w: float, slack_used: float) -> Iterator[tuple[list[Edge], float]]:
            yield (list(chosen), w)
            for j in range(i, len(cands)):
                wj, (p, q) = cands[j]
                # Consuming two stubs with this edge raises the completion
                # lower bound by its weight minus the stub halves it covers.
                extra = wj - float(nnh[p]) - float(nnh[q])
                if slack_used + extra > budget:
                    continue
                if max_edges is not None and len(chosen) >= max_edges:
                    return
                pa, qb = (p, q) if p in rem_a else (q, p)
                if rem_a.get(pa, 0) <= 0 or rem_b.get(qb, 0) <= 0:
                    continue
                rem_a[pa] -= 1
                rem_b[qb] -= 1
                chosen.append(norm_edge(p, q))
                yield from rec(j + 1, w + wj, slack_used + extra)
                chosen.pop()
                rem_a[pa] += 1
                rem_b[qb] += 1

        yield from rec(0, 0.0, 0.0)

    def merge(self, table_a: dict[tuple, Entry], members_a: set[int],
              table_b: dict[tuple, Entry], members_b: set[int]) -> dict[tuple, Entry]:
        merged_members = members_a | members_b
        complete = len(merged_members) == self.n
        out: dict[tuple, Entry] = {}
        ents_a = sorted(
            ((self.potential(e[0], e[2]), e[0], e[1], dict(e[2]), tuple(p for p, _ in e[2]))
             for e in table_a.values()), key=lambda t: t[0])
        ents_b = sorted(
            ((self.potential(e[0], e[2]), e[0], e[1], dict(e[2]), tuple(p for p, _ in e[2]))
             for e in table_b.values()), key=lambda t: t[0])
        for pot_a, wa, ea, a_stubs, a_pts in ents_a:
            if pot_a > self.incumbent + 1e-9:
                break
            for pot_b, wb, eb, b_stubs, b_pts in ents_b:
                base = wa + wb
                if pot_a + pot_b > self.incumbent + 1e-9:
                    break
                cands = self._cand_pairs(a_pts, b_pts)
                for conn, wconn in self._conn_subsets(a_stubs, b_stubs, cands,
                                                      self.incumbent + 1e-9 - pot_a - pot_b,
                                                      complete):
                    self.counters.configs_enumerated += 1
                    if self.counters.configs_enumerated > self.params.node_budget:
                        self.counters.aborted = True
                        raise NoFeasibleConfiguration("node budget exhausted")
                    used: dict[int, int] = {}
                    for u, v in conn:
                        used[u] = used.get(u, 0) + 1
                        used[v] = used.get(v, 0) + 1
                    stubs = {}
                    for src in (a_stubs, b_stubs):
                        for p, c in src.items():
                            c2 = c - used.get(p, 0)
                            if c2 > 0:
                                stubs[p] = c2
                    if sum(stubs.values()) > self.inter_cap:
                        continue
                    w = base + wconn
                    if self.potential(w, stubs) > self.incumbent + 1e-9:
                        continue
                    edges = ea | eb | frozenset(conn)
                    sig = self._sig(edges, merged_members, stubs)
                    if sig is None:
                        continue
                    if sig == CLOSED and complete and w < self.incumbent:
                        self.incumbent = w
                    prev = out.get(sig)
                    if prev is None or w < prev[0] - 1e-12 or (
                            abs(w - prev[0]) <= 1e-12 and sorted(edges) < sorted(prev[1])):
                        out[sig] = (w, edges, _stub_items(stubs))
        return self._prune(out)

    def _prune(self, table: dict[tuple, Entry]) -> dict[tuple, Entry]:
        cap = self.params.max_table
        self.counters.max_table_size = max(self.counters.max_table_size, len(table))
        if cap is None or len(table) <= cap:
            return table
        # Stratify by residual stub count: states with few stubs are the only
        # ones that can close later, but they are rarely the cheapest, so a
        # pure weight cut would starve them. Round-robin across stub-count
        # buckets, cheapest (by completion lower bound) first within each.
        buckets: dict[int, list[tuple[tuple, Entry]]] = {}
        for sig, ent in table.items():
            buckets.setdefault(sum(c for _, c in ent[2]), []).append((sig, ent))
        for b in buckets.values():
            b.sort(key=lambda kv: self.potential(kv[1][0], kv[1][2]))
        kept: dict[tuple, Entry] = {}
        rank = 0
        while len(kept) < cap:
            advanced = False
            for stubs_total in sorted(buckets):
                b = buckets[stubs_total]
                if rank < len(b):
                    advanced = True
                    sig, ent = b[rank]
                    kept[sig] = ent
                    if len(kept) >= cap:
                        break
            if not advanced:
                break
            rank += 1
        return kept

    def finalize(self, table: dict[tuple, Entry], cluster_portals: list[int],
                 full: bool) -> dict[tuple, Entry]:
        """Apply the cluster's own boundary contract: stubs at admitted portals
        only, within the crossing budget; full clusters must be closed."""
        admitted = set(cluster_portals[: self.params.portal_cap])
        out: dict[tuple, Entry] = {}
        for sig, (w, edges, stubs) in table.items():
            total = sum(c for _, c in stubs)
            if full:
                if sig == CLOSED and total == 0:
                    prev = out.get(sig)
                    if prev is None or w < prev[0]:
                        out[sig] = (w, edges, stubs)
                continue
            if total == 0 or total > self.r:
                continue
            if any(p not in admitted for p, _ in stubs):
                continue
            prev = out.get(sig)
            if prev is None or w < prev[0]:
                out[sig] = (w, edges, stubs)
        return out


def solve_sparse_dp(instance: MetricInstance, tree: ClusterTree,
                    params: SolverParams, incumbent: float | None = None,
                    counters: DPCounters | None = None) -> tuple[frozenset[Edge], float, DPCounters]:
    """Bottom-up DP over the cluster tree; returns the best closed edge set.

    Raises NoFeasibleConfiguration when the caps leave no closable root state.
    """
    if counters is None:
        counters = DPCounters()
    if incumbent is None:
        from .oracles import double_mst_baseline
        incumbent = double_mst_baseline(instance).weight if instance.n >= 3 else float("inf")
    run = _DPRun(instance, tree, params, incumbent, counters)
    tables: dict[int, dict[tuple, Entry]] = {}
    members_of = {cid: set(c.members) for cid, c in tree.clusters.items()}
    for row in reversed(tree.levels):
        for cid in row:
            c = tree.clusters[cid]
            if not c.children:
                table = run.leaf_table(c.members[0])
            else:
                kids = sorted(c.children, key=lambda ch: -len(tree.clusters[ch].members))
                table = tables.pop(kids[0])
                acc_members = set(members_of[kids[0]])
                for ch in kids[1:]:
                    table = run.merge(table, acc_members, tables.pop(ch), members_of[ch])
                    acc_members |= members_of[ch]
                    if not table:
                        break
            full = len(c.members) == instance.n
            table = run.finalize(table, c.portals, full)
            if not table:
                raise NoFeasibleConfiguration(
                    f"cluster {cid} (level {c.level}, {len(c.members)} pts) has no viable configuration")
            tables[cid] = table
    root_table = tables[tree.root.cid]
    if CLOSED not in root_table:
        raise NoFeasibleConfiguration("root not closable")
    w, edges, _ = root_table[CLOSED]
    return edges, w, counters
