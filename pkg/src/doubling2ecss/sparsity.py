"""q-sparsity scanning via MST-in-ball weights and the sparse/dense split.

All radii and weights here are in the tree's normalized units (minimum
interpoint distance 1), matching the cluster scales.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import minimum_spanning_tree
from .hierarchy import LEAF_EXP, ClusterTree
from .metric import MetricInstance


@dataclass
class SparsityParams:
    q: float
    q_prime: float | None = None
    delta: float | None = None
    epsilon: float = 0.1
    k: int = 2
    h_grid: int = 64

    @classmethod
    def defaults(cls, n: int, s: float, epsilon: float, k: int) -> "SparsityParams":
        # The theory constants; astronomically large for realistic k, so the
        # benchmark surface exposes q directly.
        q = (s / epsilon) ** (2 * k) * 2.0 ** (k * k)
        p = cls(q=q, epsilon=epsilon, k=k)
        p.q_prime = p.derived_q_prime(n)
        p.delta = epsilon / 2.0 ** (10 * k)
        return p

    def derived_q_prime(self, n: int) -> float:
        return math.ceil(13.0 * self.q * math.log(max(n, 2)) ** 0.125)

    def derived_delta(self) -> float:
        return self.delta if self.delta is not None else self.epsilon / 2.0 ** (10 * self.k)


@dataclass
class SparsityStep:
    center: int
    level: int
    q_star: float
    h: float
    n_sparse: int
    n_dense: int

    def to_json(self) -> dict:
        return {"v": self.center, "level": self.level, "q_star": self.q_star,
                "h": self.h, "|X1|": self.n_sparse, "|X2|": self.n_dense}


@dataclass
class SparsityReport:
    violating: dict | None
    chosen_h: float | None
    sparse_part: list[int]
    dense_part: list[int]
    steps: list[SparsityStep] = field(default_factory=list)

    def to_json(self) -> list[dict]:
        return [s.to_json() for s in self.steps]


def _norm_ball(dn: np.ndarray, center: int, radius: float) -> list[int]:
    return [int(i) for i in np.flatnonzero(dn[center] <= radius + 1e-9)]


def mst_ball_weight(instance: MetricInstance, tree: ClusterTree, center: int, radius: float) -> float:
    """MST weight (normalized units) of the points within `radius` of `center`."""
    dn = tree.norm_dmatrix
    members = _norm_ball(dn, center, radius)
    if len(members) <= 1:
        return 0.0
    sub = MetricInstance(dn[np.ix_(members, members)])
    return minimum_spanning_tree(sub)[1]


def find_sparsity_violation(instance: MetricInstance, tree: ClusterTree,
                            params: SparsityParams) -> dict | None:
    """Scan levels fine-to-coarse; at the first level where some cluster center
    v has w(MST(B(v, 3 s^i))) > 2 q s^i, return the densest such center."""
    s = tree.params.s
    for exp in range(0, tree.top_exp + 1):
        scale = s ** exp
        best: tuple[float, int] | None = None
        for c in tree.clusters_at(exp) if exp in tree.level_exps else []:
            w = mst_ball_weight(instance, tree, c.center, 3.0 * scale)
            if w > 2.0 * params.q * scale + 1e-12:
                if best is None or w > best[0]:
                    best = (w, c.center)
        if best is not None:
            w, v = best
            return {"v": v, "level": exp, "q_star": w / (2.0 * scale)}
    return None


def _score_h(tree: ClusterTree, instance: MetricInstance, v: int, h: float,
             exp: int, delta: float, l_prime: int) -> float:
    """Score a candidate cut radius by the total MST weight of small balls
    around the fine-level portals falling in the annulus around h."""
    dn = tree.norm_dmatrix
    s = tree.params.s
    band = delta * s ** exp
    fine_scale = s ** l_prime
    total = 0.0
    for c in tree.clusters_at(l_prime):
        for p in c.portals:
            dist = dn[v, p]
            if h - band < dist < h + band:
                total += mst_ball_weight(instance, tree, p, 4.0 * fine_scale)
    return total


def decompose_sparse_dense(instance: MetricInstance, tree: ClusterTree,
                           params: SparsityParams,
                           rng: np.random.Generator | None = None) -> SparsityReport:
    """One sparse/dense split: X2 is the ball B(v, h) around the violating
    center (to be decomposed recursively by the caller), X1 the complement.
    With no violation the degenerate clause is normalized to X2 = empty."""
    violation = find_sparsity_violation(instance, tree, params)
    n = instance.n
    if violation is None:
        return SparsityReport(violating=None, chosen_h=None,
                              sparse_part=list(range(n)), dense_part=[])
    v, exp = violation["v"], violation["level"]
    s = tree.params.s
    scale = s ** exp
    delta = params.derived_delta()
    # Finest level with scale <= delta * s^i, clamped to the available range.
    if delta * scale >= 1.0:
        l_prime = min(int(math.floor(math.log(delta * scale) / math.log(s))), tree.top_exp)
    else:
        l_prime = 0
    grid = np.linspace(12.0 * scale, 13.0 * scale, params.h_grid)
    best_h, best_score = None, None
    for h in grid:
        score = _score_h(tree, instance, v, float(h), exp, delta, l_prime)
        if best_score is None or score < best_score - 1e-12:
            best_h, best_score = float(h), score
    dn = tree.norm_dmatrix
    dense = _norm_ball(dn, v, best_h)
    dense_set = set(dense)
    sparse = [p for p in range(n) if p not in dense_set]
    step = SparsityStep(center=v, level=exp, q_star=violation["q_star"], h=best_h,
                        n_sparse=len(sparse), n_dense=len(dense))
    return SparsityReport(violating=violation, chosen_h=best_h,
                          sparse_part=sparse, dense_part=dense, steps=[step])


def max_q_star(instance: MetricInstance, tree: ClusterTree) -> float:
    """Largest w(MST(B(v, 3 s^i))) / (2 s^i) over all cluster centers and
    levels; the instance scans clean for any threshold q above this."""
    s = tree.params.s
    worst = 0.0
    for exp in range(0, tree.top_exp + 1):
        scale = s ** exp
        for c in tree.clusters_at(exp):
            w = mst_ball_weight(instance, tree, c.center, 3.0 * scale)
            worst = max(worst, w / (2.0 * scale))
    return worst
