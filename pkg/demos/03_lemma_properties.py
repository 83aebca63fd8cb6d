"""Exercise the structural lemmas the approximation argument rests on.

Three vignettes: the packing/spanning-tree bounds on nets, the well-behaved
tour transformation, and the cut-probability scaling of the random partition.

Run: python demos/03_lemma_properties.py
"""

import numpy as np

from doubling2ecss.graphs import edge_set_weight, norm_edge
from doubling2ecss.hierarchy import (
    PartitionParams,
    assign_portals,
    build_cluster_tree,
    estimate_cut_probability,
)
from doubling2ecss.metric import MetricInstance, build_net, verify_net
from doubling2ecss.transforms import make_well_behaved, well_behaved_violations


def main() -> None:
    rng = np.random.default_rng(0)
    inst = MetricInstance.euclidean(rng.random((40, 2)) * 10)

    # Nets: covering + packing at three granularities.
    diam = float(inst.dmatrix.max())
    print("alpha-nets (covering and packing certified):")
    for j in (2, 4, 8):
        alpha = diam / j
        net = build_net(inst, range(inst.n), alpha)
        cert = verify_net(inst, range(inst.n), net, alpha)
        print(f"  alpha=diam/{j}: |net|={len(net):>2}  "
              f"covering={cert['is_covering']} packing={cert['is_packing']}")

    # Well-behaved transformation: reroute a random tour through portals.
    eps = 0.1
    pp = PartitionParams.for_instance(inst, epsilon=eps, seed=1)
    tree = build_cluster_tree(inst, pp)
    assign_portals(tree)
    perm = rng.permutation(inst.n)
    tour = [norm_edge(int(perm[i]), int(perm[(i + 1) % inst.n]))
            for i in range(inst.n)]
    out = make_well_behaved(inst, tree, tour, eps)
    w_in, w_out = edge_set_weight(inst, set(tour)), edge_set_weight(inst, out)
    print(f"\nwell-behaved tour at eps={eps}:")
    print(f"  weight {w_in:.3f} -> {w_out:.3f} "
          f"(bound {(1 + 6 * eps) * w_in:.3f}, ratio {w_out / w_in:.4f})")
    print(f"  non-portal boundary crossings: {len(well_behaved_violations(tree, out))}")

    # Cut probability shrinks with distance over scale; look at a coarse
    # level whose clusters are comparable to the instance diameter.
    import math
    stats = inst.stats()
    top = math.ceil(math.log(stats.aspect_ratio) / math.log(pp.s))
    level = max(0, top - 2)
    print(f"\ncut probability at partition level {level} (500 draws):")
    d = inst.dmatrix
    pairs = [(0, int(np.argsort(d[0])[j])) for j in (1, 10, 20, 39)]
    for u, v in pairs:
        p = estimate_cut_probability(inst, pp, u, v, level=level, trials=500)
        print(f"  d({u},{v})={d[u, v]:6.3f}  Pr[cut] ~= {p:.3f}")
    print("closer pairs are separated less often -- the property that keeps")
    print("the expected portal detour cost proportional to the edge length.")


if __name__ == "__main__":
    main()
