"""Acceptance suite: ten oracle- and property-based criteria at full size.

Each test prints one PASS/FAIL line (run with -s or read the captured output).
Criteria 1-3 run before criterion 7 so the patch log they populate is what
criterion 7 audits. The final test is the scaling smoke check.
"""

import statistics
import time

import numpy as np
import pytest

from doubling2ecss import properties
from doubling2ecss.generators import GeneratorSpec, generate_instance
from doubling2ecss.solver import solve_2ecss
from doubling2ecss.transforms import reset_patch_log

SEED = 0


def check(result):
    print(result.line())
    assert result.passed, result.line()


@pytest.fixture(scope="module", autouse=True)
def fresh_patch_log():
    reset_patch_log()
    yield


def test_criterion_1_feasibility():
    check(properties.criterion_1_feasibility(count=500, seed=SEED))


def test_criterion_2_oracle_equivalence():
    check(properties.criterion_2_oracle_equivalence(n_instances=30, n_seeds=50,
                                                    seed=SEED))


def test_criterion_3_approximation():
    check(properties.criterion_3_approximation(count=100, seed=SEED))


def test_criterion_4_spanning_tree_lemma():
    check(properties.criterion_4_spanning_tree(instances=20, subsets=1000,
                                               seed=SEED))


def test_criterion_5_packing_lemma():
    check(properties.criterion_5_packing(instances=20, subsets=1000, seed=SEED))


def test_criterion_6_well_behaved_tours():
    check(properties.criterion_6_well_behaved(tours=200, seed=SEED))


def test_criterion_7_patching_audit():
    check(properties.criterion_7_patching(seed=SEED, supplement=50))


def test_criterion_8_cut_probability():
    check(properties.criterion_8_cut_probability(trials=10_000, pairs=50,
                                                 seed=SEED))


def test_criterion_9_sparse_decomposition():
    check(properties.criterion_9_sparse_decomposition(count=50, seed=SEED))


def test_criterion_10_oracle_sandwich():
    check(properties.criterion_10_sandwich(seed=SEED, count=40))


def test_scaling_smoke_doubling_n():
    """Doubling n from 30 to 60 raises median wall time by < 20x at fixed
    parameters."""
    medians = {}
    for n in (30, 60):
        times = []
        for i in range(5):
            inst = generate_instance(GeneratorSpec(kind="uniform-cube", n=n,
                                                   dim=2, seed=1000 + i))
            t0 = time.perf_counter()
            sol, _ = solve_2ecss(inst, seed=i)
            times.append(time.perf_counter() - t0)
            assert sol.feasible
        medians[n] = statistics.median(times)
    factor = medians[60] / max(medians[30], 1e-9)
    line = (f"{'PASS' if factor < 20 else 'FAIL'} scaling smoke: "
            f"median {medians[30] * 1e3:.1f} ms (n=30) -> "
            f"{medians[60] * 1e3:.1f} ms (n=60), factor {factor:.2f}")
    print(line)
    assert factor < 20, line
