"""Compare the solver against the exact oracles across small instances.

Prints the sandwich w(MST) <= 2-ECSS <= TSP <= 2*MST instance by instance,
plus where the approximate solver lands inside it.

Run: python demos/02_oracle_comparison.py
"""

import numpy as np

from doubling2ecss.generators import GeneratorSpec, generate_instance
from doubling2ecss.graphs import minimum_spanning_tree
from doubling2ecss.oracles import brute_force_2ecss, double_mst_baseline, held_karp_tsp
from doubling2ecss.solver import solve_2ecss


def main() -> None:
    print(f"{'instance':<28} {'mst':>7} {'2ecss*':>7} {'tsp':>7} {'2mst':>7} "
          f"{'solver':>7} {'ratio':>6}")
    ratios = []
    for i in range(8):
        n = 5 + i % 5
        inst = generate_instance(GeneratorSpec(kind="uniform-cube", n=n, dim=2,
                                               seed=100 + i))
        mst = minimum_spanning_tree(inst)[1]
        opt = brute_force_2ecss(inst).weight
        tsp = held_karp_tsp(inst).weight
        dm = double_mst_baseline(inst).weight
        sol, _ = solve_2ecss(inst, seed=i)
        ratio = sol.weight / opt
        ratios.append(ratio)
        print(f"{inst.name:<28} {mst:>7.3f} {opt:>7.3f} {tsp:>7.3f} {dm:>7.3f} "
              f"{sol.weight:>7.3f} {ratio:>6.3f}")
        assert mst <= opt <= tsp + 1e-9 and tsp <= dm <= 2 * mst + 1e-9
    print(f"\nmean solver/optimum ratio: {np.mean(ratios):.4f} "
          f"(max {np.max(ratios):.4f})")
    print("note: the optimal 2-ECSS always weighs at most the optimal TSP tour,")
    print("and the doubled-MST baseline caps everything at twice the MST.")


if __name__ == "__main__":
    main()
