"""Walk through one solve: cluster tree, portals, sparsity scan, DP, repair.

Run: python demos/01_solve_pipeline.py
"""

from doubling2ecss.dp import SolverParams
from doubling2ecss.generators import GeneratorSpec, generate_instance
from doubling2ecss.graphs import certify_2ecss, minimum_spanning_tree
from doubling2ecss.hierarchy import PartitionParams, assign_portals, build_cluster_tree
from doubling2ecss.oracles import brute_force_2ecss, double_mst_baseline
from doubling2ecss.solver import solve_2ecss
from doubling2ecss.sparsity import SparsityParams, decompose_sparse_dense


def main() -> None:
    inst = generate_instance(GeneratorSpec(kind="uniform-cube", n=9, dim=2, seed=7))
    print(f"instance: {inst.name} (n={inst.n})")
    mst_w = minimum_spanning_tree(inst)[1]
    print(f"MST weight            {mst_w:.4f}  (lower bound)")

    # 1. Randomized cluster tree with portals.
    pp = PartitionParams.for_instance(inst, epsilon=0.25, seed=0)
    tree = build_cluster_tree(inst, pp)
    portals = assign_portals(tree)
    print(f"\ncluster tree: {len(tree.levels)} levels, {len(tree.clusters)} clusters, "
          f"k={pp.k}, s={pp.s:.3f}")
    for row, exp in zip(tree.levels, tree.level_exps):
        sizes = sorted((len(tree.clusters[c].members) for c in row), reverse=True)
        print(f"  level exp {exp:>3}: {len(row):>2} clusters, sizes {sizes}")
    print(f"portals assigned to {len(portals)} clusters")

    # 2. Sparsity scan (uniform points are sparse at any sane threshold).
    sp = SparsityParams(q=50.0, epsilon=0.25, k=pp.k)
    dec = decompose_sparse_dense(inst, tree, sp)
    print(f"\nsparsity scan at q={sp.q}: violation={dec.violating}, "
          f"|sparse|={len(dec.sparse_part)}, |dense|={len(dec.dense_part)}")

    # 3. Full solve (portal DP + repair + baseline fallback) vs the oracles.
    sol, rep = solve_2ecss(inst, SolverParams(epsilon=0.25, best_of=5), seed=0)
    baseline = double_mst_baseline(inst).weight
    opt = brute_force_2ecss(inst).weight
    cert = certify_2ecss(sol.edges, inst.n)
    print(f"\nsolver weight         {sol.weight:.4f}  ({len(sol.edges)} edges)")
    print(f"brute-force optimum   {opt:.4f}  -> ratio {sol.weight / opt:.4f}")
    print(f"doubled-MST baseline  {baseline:.4f}  -> ratio {sol.weight / baseline:.4f}")
    print(f"certificate: spanning={cert['spanning']} bridgeless={cert['bridgeless']}")
    print(f"DP work: {rep.dp['configs_enumerated']} configurations, "
          f"max table {rep.dp['max_table_size']}")


if __name__ == "__main__":
    main()
