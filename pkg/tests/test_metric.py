"""Metric container, nets, and doubling-dimension estimation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doubling2ecss.metric import (
    MetricError,
    MetricInstance,
    ball_members,
    Ball,
    build_net,
    estimate_doubling_dimension,
    metric_stats,
    verify_net,
)


def square_instance(side: float = 1.0) -> MetricInstance:
    return MetricInstance.euclidean(
        [[0, 0], [side, 0], [side, side], [0, side]], name="square")


point_sets = st.lists(
    st.tuples(st.floats(0, 100, allow_nan=False, width=32),
              st.floats(0, 100, allow_nan=False, width=32)),
    min_size=2, max_size=20, unique=True)


def test_euclidean_distances():
    inst = square_instance(2.0)
    assert inst.n == 4
    assert inst.d(0, 1) == pytest.approx(2.0)
    assert inst.d(0, 2) == pytest.approx(2.0 * np.sqrt(2))
    assert np.allclose(inst.dmatrix, inst.dmatrix.T)
    assert np.all(np.diag(inst.dmatrix) == 0)


def test_from_matrix_rejects_asymmetric():
    with pytest.raises(MetricError):
        MetricInstance.from_matrix([[0, 1], [2, 0]])


def test_from_matrix_rejects_triangle_violation():
    with pytest.raises(MetricError):
        MetricInstance.from_matrix([[0, 1, 5], [1, 0, 1], [5, 1, 0]])


def test_from_matrix_rejects_negative():
    with pytest.raises(MetricError):
        MetricInstance.from_matrix([[0, -1], [-1, 0]])


def test_submetric_preserves_distances():
    inst = square_instance()
    sub = inst.submetric([0, 2])
    assert sub.n == 2
    assert sub.d(0, 1) == pytest.approx(inst.d(0, 2))


def test_save_load_roundtrip(tmp_path):
    inst = square_instance(3.0)
    path = tmp_path / "inst.json"
    inst.save(path)
    back = MetricInstance.load(path)
    assert back.n == inst.n
    assert np.allclose(back.dmatrix, inst.dmatrix)


def test_stats_square():
    stats = metric_stats(square_instance(1.0))
    assert stats.min_interpoint == pytest.approx(1.0)
    assert stats.diameter == pytest.approx(np.sqrt(2))
    assert stats.aspect_ratio == pytest.approx(np.sqrt(2))


def test_ball_members():
    inst = square_instance(1.0)
    assert ball_members(inst, Ball(center=0, radius=1.0)) == [0, 1, 3]
    assert ball_members(inst, Ball(center=0, radius=2.0)) == [0, 1, 2, 3]


@given(point_sets)
@settings(max_examples=50, deadline=None)
def test_net_is_covering_and_packing(pts):
    inst = MetricInstance.euclidean(pts)
    alpha = float(inst.dmatrix.max()) / 3.0
    net = build_net(inst, range(inst.n), alpha)
    cert = verify_net(inst, range(inst.n), net, alpha)
    assert cert["is_covering"] and cert["is_packing"]


@given(point_sets)
@settings(max_examples=30, deadline=None)
def test_net_idempotent(pts):
    inst = MetricInstance.euclidean(pts)
    alpha = float(inst.dmatrix.max()) / 4.0
    net = build_net(inst, range(inst.n), alpha)
    again = build_net(inst, net, alpha)
    assert sorted(again) == sorted(net)


def test_net_seeds_come_first():
    inst = square_instance(1.0)
    net = build_net(inst, range(4), 0.5, seeds=[2])
    assert net[0] == 2


def test_net_rejects_empty_subset():
    with pytest.raises(MetricError):
        build_net(square_instance(), [], 0.1)


@given(point_sets, st.floats(0.1, 50, allow_nan=False))
@settings(max_examples=30, deadline=None)
def test_scaling_equivariance(pts, factor):
    inst = MetricInstance.euclidean(pts)
    scaled = MetricInstance.euclidean(np.asarray(pts, dtype=float) * factor)
    assert np.allclose(scaled.dmatrix, inst.dmatrix * factor, rtol=1e-9, atol=1e-9)


def test_doubling_dimension_line_vs_plane():
    line = MetricInstance.euclidean(np.arange(30, dtype=float).reshape(-1, 1))
    rng = np.random.default_rng(0)
    plane = MetricInstance.euclidean(rng.random((30, 2)) * 10)
    k_line = estimate_doubling_dimension(line)
    k_plane = estimate_doubling_dimension(plane)
    assert 1 <= k_line <= k_plane <= 6
