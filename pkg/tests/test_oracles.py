"""Exact oracles and the doubled-MST baseline."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doubling2ecss.graphs import certify_2ecss, minimum_spanning_tree
from doubling2ecss.metric import MetricInstance
from doubling2ecss.oracles import (
    OracleRangeError,
    brute_force_2ecss,
    double_mst_baseline,
    held_karp_tsp,
)


def random_instance(n, seed=0, dim=2):
    rng = np.random.default_rng(seed)
    return MetricInstance.euclidean(rng.random((n, dim)) * 10)


def test_brute_force_square_is_cycle():
    inst = MetricInstance.euclidean([[0, 0], [1, 0], [1, 1], [0, 1]])
    res = brute_force_2ecss(inst)
    assert res.weight == pytest.approx(4.0)
    assert res.edges == frozenset({(0, 1), (1, 2), (2, 3), (0, 3)})


def test_brute_force_output_is_certified():
    inst = random_instance(7, seed=5)
    res = brute_force_2ecss(inst)
    cert = certify_2ecss(res.edges, inst.n)
    assert cert["spanning"] and cert["bridgeless"]


def test_brute_force_range_guard():
    with pytest.raises(OracleRangeError):
        brute_force_2ecss(random_instance(11))


def test_held_karp_square():
    inst = MetricInstance.euclidean([[0, 0], [1, 0], [1, 1], [0, 1]])
    res = held_karp_tsp(inst)
    assert res.weight == pytest.approx(4.0)
    assert len(res.edges) == 4


def test_held_karp_range_guard():
    with pytest.raises(OracleRangeError):
        held_karp_tsp(random_instance(16))


def test_double_mst_is_certified_any_size():
    inst = random_instance(40, seed=9)
    res = double_mst_baseline(inst)
    cert = certify_2ecss(res.edges, inst.n)
    assert cert["spanning"] and cert["bridgeless"]


@given(st.integers(0, 10_000), st.integers(3, 8), st.integers(1, 3))
@settings(max_examples=40, deadline=None)
def test_oracle_sandwich(seed, n, dim):
    inst = random_instance(n, seed=seed, dim=dim)
    mst = minimum_spanning_tree(inst)[1]
    b = brute_force_2ecss(inst).weight
    h = held_karp_tsp(inst).weight
    dm = double_mst_baseline(inst).weight
    assert mst <= b + 1e-9
    assert b <= h + 1e-9
    assert h <= dm + 1e-9
    assert dm <= 2 * mst + 1e-9
