"""Property suites behind the acceptance checklist and the `verify` CLI.

Each criterion is a standalone function returning a CriterionResult; run_all
executes a selection in order. Criterion 7 audits the patch log accumulated by
the solver runs of criteria 1-3, so ordering matters when it is included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dp import SolverParams, solve_sparse_dp, NoFeasibleConfiguration
from .generators import GeneratorSpec, default_suite, generate_instance
from .graphs import certify_2ecss, minimum_spanning_tree
from .hierarchy import (
    PartitionParams,
    assign_portals,
    build_cluster_tree,
    cut_probability_table,
)
from .metric import MetricInstance, build_net, estimate_doubling_dimension
from .oracles import brute_force_2ecss, double_mst_baseline, held_karp_tsp
from .sparsity import SparsityParams, decompose_sparse_dense, find_sparsity_violation
from .solver import solve_2ecss
from .transforms import PATCH_LOG, make_well_behaved, well_behaved_violations


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} criterion {self.number} ({self.name}): {self.detail}"


# -- 1: feasibility ----------------------------------------------------------

def criterion_1_feasibility(count: int = 500, seed: int = 0) -> CriterionResult:
    """Every solve over a mixed generator suite certifies as a 2-ECSS."""
    specs = default_suite(count, seed=seed)
    bad = 0
    solved = 0
    for i, spec in enumerate(specs):
        inst = generate_instance(spec)
        sol, _ = solve_2ecss(inst, seed=seed + i)
        solved += 1
        cert = certify_2ecss(sol.edges, inst.n)
        if not (cert["spanning"] and cert["bridgeless"]):
            bad += 1
    return CriterionResult(
        1, "feasibility", bad == 0,
        f"{solved - bad}/{solved} solutions certified 2-edge-connected spanning",
        {"instances": solved, "infeasible": bad})


# -- 2: oracle equivalence in exact mode -------------------------------------

def criterion_2_oracle_equivalence(n_instances: int = 30, n_seeds: int = 50,
                                   seed: int = 0) -> CriterionResult:
    """Exhaustive-portal DP equals the brute-force optimum on n <= 6."""
    rng = np.random.default_rng(seed)
    mismatches = 0
    runs = 0
    worst = 0.0
    for i in range(n_instances):
        n = int(rng.integers(3, 7))
        pts = rng.random((n, 2))
        inst = MetricInstance.euclidean(pts)
        opt = brute_force_2ecss(inst).weight
        for s in range(n_seeds):
            pp = PartitionParams.for_instance(inst, epsilon=0.25, seed=1000 * i + s,
                                              portal_alpha_factor=0.0)
            tree = build_cluster_tree(inst, pp)
            assign_portals(tree)
            runs += 1
            try:
                _, w, _ = solve_sparse_dp(inst, tree, SolverParams.exact_mode(n))
            except NoFeasibleConfiguration:
                mismatches += 1
                continue
            worst = max(worst, abs(w - opt))
            if abs(w - opt) > 1e-9:
                mismatches += 1
    return CriterionResult(
        2, "oracle equivalence", mismatches == 0,
        f"{runs - mismatches}/{runs} exact-mode runs matched brute force (worst gap {worst:.2e})",
        {"runs": runs, "mismatches": mismatches, "worst_gap": worst})


# -- 3: approximation quality ------------------------------------------------

def criterion_3_approximation(count: int = 100, seed: int = 0) -> CriterionResult:
    """n=9 uniform-cube: ratio to optimum <= 1.25 in >= 90%, <= baseline always."""
    ratios = []
    over_baseline = 0
    for i in range(count):
        inst = generate_instance(GeneratorSpec(kind="uniform-cube", n=9, dim=2,
                                               seed=seed * 10007 + i))
        sol, rep = solve_2ecss(inst, SolverParams(epsilon=0.25, best_of=5), seed=i)
        opt = brute_force_2ecss(inst).weight
        ratios.append(sol.weight / opt)
        if sol.weight > rep.baseline_weight + 1e-9:
            over_baseline += 1
    r = np.array(ratios)
    frac = float(np.mean(r <= 1.25 + 1e-9))
    passed = frac >= 0.9 and over_baseline == 0
    return CriterionResult(
        3, "approximation quality", passed,
        f"ratio<=1.25 in {frac * 100:.0f}% (mean {r.mean():.3f}, max {r.max():.3f}), "
        f"{over_baseline} above baseline",
        {"fraction_within": frac, "mean_ratio": float(r.mean()),
         "max_ratio": float(r.max()), "over_baseline": over_baseline})


# -- 4 & 5: spanning tree and packing lemmas ---------------------------------

def _lemma_runs(instances: int = 20, subsets: int = 1000, seed: int = 0):
    """Shared sampling for criteria 4 and 5: random subsets with their MST
    check plus nets built on each subset."""
    rng = np.random.default_rng(seed)
    specs = default_suite(instances, seed=seed + 1, n_range=(8, 40))
    per_instance = max(1, subsets // instances)
    mst_violations = []
    net_violations = []
    nets_checked = 0
    subsets_checked = 0
    for spec in specs:
        inst = generate_instance(spec)
        k = max(1, estimate_doubling_dimension(inst))
        for _ in range(per_instance):
            size = int(rng.integers(2, inst.n + 1))
            subset = sorted(rng.choice(inst.n, size=size, replace=False).tolist())
            sub = inst.submetric(subset)
            subsets_checked += 1
            diam = float(sub.dmatrix.max())
            w = minimum_spanning_tree(sub)[1]
            bound = 4.0 * size ** (1.0 - 1.0 / k) * diam
            if w > bound + 1e-9:
                mst_violations.append((spec.kind, size, w, bound))
            # Nets at a few granularities; packing bound from the net's own
            # aspect ratio.
            if diam <= 0:
                continue
            for j in (2, 4, 8):
                alpha = diam / j
                net = build_net(sub, list(range(sub.n)), alpha)
                nets_checked += 1
                if len(net) < 2:
                    continue
                dn = sub.dmatrix[np.ix_(net, net)]
                inter = float(dn[dn > 0].min())
                ndiam = float(dn.max())
                aspect = ndiam / inter
                if len(net) > (2.0 * aspect) ** k + 1e-9:
                    net_violations.append((spec.kind, size, alpha, len(net), aspect, k))
    return subsets_checked, mst_violations, nets_checked, net_violations


_LEMMA_CACHE: dict = {}


def _lemma_cached(instances: int, subsets: int, seed: int):
    key = (instances, subsets, seed)
    if key not in _LEMMA_CACHE:
        _LEMMA_CACHE[key] = _lemma_runs(instances, subsets, seed)
    return _LEMMA_CACHE[key]


def criterion_4_spanning_tree(instances: int = 20, subsets: int = 1000,
                              seed: int = 0) -> CriterionResult:
    checked, bad, _, _ = _lemma_cached(instances, subsets, seed)
    return CriterionResult(
        4, "spanning tree lemma", not bad,
        f"{checked - len(bad)}/{checked} subsets within 4*|X'|^(1-1/k)*diam",
        {"subsets": checked, "violations": len(bad)})


def criterion_5_packing(instances: int = 20, subsets: int = 1000,
                        seed: int = 0) -> CriterionResult:
    _, _, nets, bad = _lemma_cached(instances, subsets, seed)
    return CriterionResult(
        5, "packing lemma", not bad,
        f"{nets - len(bad)}/{nets} nets within (2*aspect)^k",
        {"nets": nets, "violations": len(bad)})


# -- 6: well-behaved tours ---------------------------------------------------

def criterion_6_well_behaved(tours: int = 200, seed: int = 0) -> CriterionResult:
    """Rerouted tours stay within (1+6eps) and cross only at portals."""
    rng = np.random.default_rng(seed)
    from .graphs import edge_set_weight, norm_edge
    weight_bad = 0
    portal_bad = 0
    runs = 0
    for eps in (0.1, 0.01):
        for t in range(tours // 2):
            n = int(rng.integers(8, 26))
            pts = rng.random((n, 2)) * 10
            inst = MetricInstance.euclidean(pts)
            pp = PartitionParams.for_instance(inst, epsilon=eps, seed=seed + 31 * t)
            tree = build_cluster_tree(inst, pp)
            assign_portals(tree)
            perm = rng.permutation(n)
            tour = [norm_edge(int(perm[i]), int(perm[(i + 1) % n])) for i in range(n)]
            runs += 1
            w_in = edge_set_weight(inst, set(tour))
            try:
                out = make_well_behaved(inst, tree, tour, eps)
            except AssertionError:
                weight_bad += 1
                continue
            if edge_set_weight(inst, out) > (1.0 + 6.0 * eps) * w_in + 1e-9:
                weight_bad += 1
            if well_behaved_violations(tree, out):
                portal_bad += 1
    ok = weight_bad == 0 and portal_bad == 0
    return CriterionResult(
        6, "well-behaved tour", ok,
        f"{runs} tours: {weight_bad} weight-bound violations, {portal_bad} non-portal crossings",
        {"tours": runs, "weight_violations": weight_bad, "portal_violations": portal_bad})


# -- 7: patching audit -------------------------------------------------------

def criterion_7_patching(seed: int = 0, supplement: int = 50) -> CriterionResult:
    """Audit every patch call logged so far (criteria 1-3 populate the log).

    Solver outputs are degree-2 cycles in practice, so the pipeline rarely
    needs to patch; when the log is empty the property is exercised on a
    deterministic batch of crossing-heavy edge sets instead of passing
    vacuously."""
    from .transforms import patch_crossings
    pipeline_calls = len(PATCH_LOG)
    supplemented = 0
    if pipeline_calls == 0:
        rng = np.random.default_rng(seed)
        for i in range(supplement):
            n = int(rng.integers(10, 25))
            pts = rng.random((n, 2)) * 10
            inst = MetricInstance.euclidean(pts)
            inside = set(range(n // 3))
            hubs = list(inside)[: max(1, len(inside) // 2)]
            edges = {(h, j) for h in hubs for j in rng.choice(
                range(n // 3, n), size=int(rng.integers(3, 6)), replace=False)}
            patch_crossings(inst, edges, inside)  # appends to PATCH_LOG
            supplemented += 1
    bad = [s for s in PATCH_LOG
           if s.max_group_after > 2 or s.added_weight > s.bound + 1e-9]
    return CriterionResult(
        7, "patching", not bad,
        f"{pipeline_calls} pipeline + {supplemented} supplementary patch calls audited, "
        f"{len(bad)} out of bounds",
        {"pipeline_calls": pipeline_calls, "supplementary_calls": supplemented,
         "violations": len(bad)})


# -- 8: cut probability scaling ----------------------------------------------

def criterion_8_cut_probability(trials: int = 10_000, pairs: int = 50,
                                seed: int = 0) -> CriterionResult:
    """Fit Pr[cut] <= C*k*d(u,v)/scale on half the samples; validate on the
    other half within 3 binomial standard deviations."""
    rng = np.random.default_rng(seed)
    pts = rng.random((100, 2)) * 10
    inst = MetricInstance.euclidean(pts)
    pp = PartitionParams.for_instance(inst, epsilon=0.25, seed=seed)
    k = pp.k
    d = inst.dmatrix
    # Pairs spread over distances; a mid-tree level so cuts are non-trivial.
    idx = [(int(u), int(v)) for u, v in rng.integers(0, 100, size=(pairs, 2)) if u != v]
    while len(idx) < pairs:
        u, v = (int(x) for x in rng.integers(0, 100, size=2))
        if u != v:
            idx.append((u, v))
    idx = idx[:pairs]
    stats = inst.stats()
    top = max(1, math.ceil(math.log(max(stats.aspect_ratio, 2.0)) / math.log(pp.s)))
    level = max(0, top - 2)
    scale = pp.s ** level * stats.min_interpoint
    half = trials // 2
    fit_counts = cut_probability_table(inst, pp, idx, level, half,
                                       rng=np.random.default_rng(seed + 1))
    val_counts = cut_probability_table(inst, pp, idx, level, trials - half,
                                       rng=np.random.default_rng(seed + 2))
    ratios = [(fit_counts[i] / half) * scale / (k * d[u, v]) for i, (u, v) in enumerate(idx)]
    c_fit = max(ratios)
    exceed = 0
    for i, (u, v) in enumerate(idx):
        bound = min(1.0, c_fit * k * float(d[u, v]) / scale)
        p_hat = val_counts[i] / (trials - half)
        sigma = math.sqrt(max(bound * (1 - bound), 1e-12) / (trials - half))
        if p_hat > bound + 3.0 * sigma:
            exceed += 1
    return CriterionResult(
        8, "cut probability scaling", exceed == 0,
        f"C={c_fit:.3f} fitted on {pairs} pairs; {exceed} exceed the bound by >3 sigma",
        {"C": float(c_fit), "pairs": pairs, "exceeding": exceed, "level": level})


# -- 9: sparse decomposition -------------------------------------------------

def make_dense_blob_instance(seed: int, n_scatter: int = 14, side: int = 5) -> MetricInstance:
    """Wide scatter plus one tight jittered grid blob.

    The blob's spacing sets the normalization unit, so at the finest scan
    level a 3-unit ball around a blob point holds the whole grid and its MST
    weight far exceeds any modest threshold, while the sparse scatter scans
    clean. The blob diameter stays under the 12-unit cut radius, so the dense
    part swallows it whole and the remainder re-scans clean."""
    rng = np.random.default_rng(seed)
    scatter = rng.random((n_scatter, 2)) * 1000.0
    spacing = 0.5
    gx, gy = np.meshgrid(np.arange(side), np.arange(side), indexing="ij")
    grid = np.stack([gx, gy], axis=-1).reshape(-1, 2).astype(float) * spacing
    grid += rng.uniform(-0.05, 0.05, size=grid.shape) * spacing
    blob = scatter[0] + 15.0 + grid
    return MetricInstance.euclidean(np.vstack([scatter, blob]))


def criterion_9_sparse_decomposition(count: int = 50, seed: int = 0) -> CriterionResult:
    """Engineered violators: disjoint cover, q* > q at the violation, and the
    sparse part re-scans clean at the derived threshold q'."""
    bad = []
    q = 2.0  # between the scatter's clean level (~q'/13) and the blob's q*
    for i in range(count):
        inst = make_dense_blob_instance(seed * 797 + i)
        pp = PartitionParams.for_instance(inst, epsilon=0.25, seed=i)
        tree = build_cluster_tree(inst, pp)
        assign_portals(tree)
        sp = SparsityParams(q=q, epsilon=0.25, k=pp.k)
        report = decompose_sparse_dense(inst, tree, sp)
        n = inst.n
        if report.violating is None:
            bad.append((i, "no violation detected"))
            continue
        if report.violating["q_star"] <= q + 1e-12:
            bad.append((i, "q* not above q"))
        parts = set(report.sparse_part) | set(report.dense_part)
        if parts != set(range(n)) or set(report.sparse_part) & set(report.dense_part):
            bad.append((i, "parts not a disjoint cover"))
            continue
        if not report.sparse_part:
            continue  # everything dense: nothing to re-scan
        x1 = inst.submetric(sorted(report.sparse_part))
        pp1 = PartitionParams.for_instance(x1, epsilon=0.25, seed=i + 1)
        tree1 = build_cluster_tree(x1, pp1)
        q_prime = sp.derived_q_prime(n)
        sp1 = SparsityParams(q=q_prime, epsilon=0.25, k=pp.k)
        if find_sparsity_violation(x1, tree1, sp1) is not None:
            bad.append((i, "sparse part not clean at q'"))
    return CriterionResult(
        9, "sparse decomposition", not bad,
        f"{count - len(bad)}/{count} engineered instances decomposed correctly"
        + (f"; first failure: {bad[0]}" if bad else ""),
        {"instances": count, "failures": bad[:5]})


# -- 10: oracle sandwich -----------------------------------------------------

def criterion_10_sandwich(seed: int = 0, count: int = 40) -> CriterionResult:
    """w(MST) <= brute <= held-karp <= double-MST <= 2*w(MST) on n <= 9."""
    rng = np.random.default_rng(seed)
    bad = 0
    for i in range(count):
        n = int(rng.integers(3, 10))
        dim = int(rng.integers(1, 4))
        pts = rng.random((n, dim)) * 10
        inst = MetricInstance.euclidean(pts)
        mst = minimum_spanning_tree(inst)[1]
        b = brute_force_2ecss(inst).weight
        h = held_karp_tsp(inst).weight
        dm = double_mst_baseline(inst).weight
        chain = (mst <= b + 1e-9 and b <= h + 1e-9 and h <= dm + 1e-9
                 and dm <= 2 * mst + 1e-9)
        if not chain:
            bad += 1
    return CriterionResult(
        10, "oracle sandwich", bad == 0,
        f"{count - bad}/{count} instances satisfy MST <= 2ECSS <= TSP <= 2MST",
        {"instances": count, "violations": bad})


LEMMA_CRITERIA = (4, 5, 6, 8, 9, 10)
ALL_CRITERIA = tuple(range(1, 11))


def run_all(numbers=LEMMA_CRITERIA, seed: int = 0, quick: bool = False) -> list[CriterionResult]:
    """Run the selected criteria in order. `quick` scales the heavy suites
    down for smoke runs; acceptance uses the full sizes."""
    scale = 0.1 if quick else 1.0

    def sz(x: int) -> int:
        return max(2, int(x * scale))

    table = {
        1: lambda: criterion_1_feasibility(count=sz(500), seed=seed),
        2: lambda: criterion_2_oracle_equivalence(n_instances=sz(30), n_seeds=sz(50), seed=seed),
        3: lambda: criterion_3_approximation(count=sz(100), seed=seed),
        4: lambda: criterion_4_spanning_tree(instances=sz(20), subsets=sz(1000), seed=seed),
        5: lambda: criterion_5_packing(instances=sz(20), subsets=sz(1000), seed=seed),
        6: lambda: criterion_6_well_behaved(tours=sz(200), seed=seed),
        7: lambda: criterion_7_patching(seed=seed, supplement=sz(50)),
        8: lambda: criterion_8_cut_probability(trials=sz(10_000), pairs=sz(50), seed=seed),
        9: lambda: criterion_9_sparse_decomposition(count=sz(50), seed=seed),
        10: lambda: criterion_10_sandwich(seed=seed, count=sz(40)),
    }
    return [table[num]() for num in numbers]
