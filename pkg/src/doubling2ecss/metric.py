"""Finite metric spaces: distance access, nets, stats, doubling-dimension estimation.

Instances are backed either by explicit symmetric distance matrices (validated
on load) or by low-dimensional Euclidean coordinates. All distances are doubles;
equality comparisons use an absolute tolerance of 1e-9.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

TOL = 1e-9


class MetricError(ValueError):
    """Raised for inputs that do not form a valid metric instance."""


@dataclass(frozen=True)
class MetricStats:
    diameter: float
    min_interpoint: float
    aspect_ratio: float


@dataclass(frozen=True)
class Ball:
    center: int
    radius: float


class MetricInstance:
    """A finite metric space over points 0..n-1.

    Use :meth:`euclidean` or :meth:`from_matrix` to construct; the raw
    constructor accepts a pre-validated distance matrix.
    """

    def __init__(self, dmatrix: np.ndarray, name: str = "", points: np.ndarray | None = None):
        self._d = np.asarray(dmatrix, dtype=float)
        self.name = name
        self.points = None if points is None else np.asarray(points, dtype=float)
        self._stats: MetricStats | None = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def euclidean(cls, points: Sequence[Sequence[float]] | np.ndarray, name: str = "") -> "MetricInstance":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.ndim != 2 or pts.shape[1] not in (1, 2, 3):
            raise MetricError(f"euclidean points must have dimension 1..3, got shape {pts.shape}")
        diff = pts[:, None, :] - pts[None, :, :]
        d = np.sqrt((diff * diff).sum(axis=2))
        inst = cls(d, name=name, points=pts)
        if inst.n >= 2:
            off = d[~np.eye(len(pts), dtype=bool)]
            if off.min() <= 0:
                raise MetricError("duplicate points in euclidean instance")
        return inst

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[float]] | np.ndarray, name: str = "") -> "MetricInstance":
        d = np.asarray(matrix, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise MetricError("distance matrix must be square")
        if np.any(np.abs(np.diag(d)) > TOL):
            raise MetricError("distance matrix diagonal must be zero")
        if np.any(np.abs(d - d.T) > TOL):
            raise MetricError("distance matrix must be symmetric within 1e-9")
        n = d.shape[0]
        if n >= 2:
            off = d[~np.eye(n, dtype=bool)]
            if off.min() <= 0:
                raise MetricError("off-diagonal distances must be positive")
        # Triangle inequality, rejecting violations beyond 1e-9 absolute.
        for k in range(n):
            slack = d - (d[:, k][:, None] + d[None, k, :])
            if slack.max() > TOL:
                i, j = np.unravel_index(np.argmax(slack), slack.shape)
                raise MetricError(
                    f"triangle inequality violated: d({i},{j})={d[i, j]:.6g} > "
                    f"d({i},{k})+d({k},{j})={d[i, k] + d[k, j]:.6g}"
                )
        d = 0.5 * (d + d.T)
        np.fill_diagonal(d, 0.0)
        return cls(d, name=name)

    # -- basic access ------------------------------------------------------

    @property
    def n(self) -> int:
        return self._d.shape[0]

    @property
    def dmatrix(self) -> np.ndarray:
        return self._d

    def d(self, u: int, v: int) -> float:
        return float(self._d[u, v])

    def stats(self) -> MetricStats:
        if self._stats is None:
            self._stats = metric_stats(self)
        return self._stats

    def submetric(self, subset: Sequence[int], name: str = "") -> "MetricInstance":
        """Induced sub-metric on `subset`; local point i maps to subset[i]."""
        idx = np.asarray(sorted(subset), dtype=int)
        sub = self._d[np.ix_(idx, idx)]
        pts = None if self.points is None else self.points[idx]
        return MetricInstance(sub, name=name or f"{self.name}[{len(idx)}]", points=pts)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        if self.points is not None:
            return {
                "name": self.name,
                "kind": "euclidean",
                "dim": int(self.points.shape[1]),
                "points": self.points.tolist(),
            }
        return {"name": self.name, "kind": "matrix", "matrix": self._d.tolist()}

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1))

    @classmethod
    def from_json(cls, obj: dict) -> "MetricInstance":
        kind = obj.get("kind")
        if kind == "euclidean":
            return cls.euclidean(obj["points"], name=obj.get("name", ""))
        if kind == "matrix":
            return cls.from_matrix(obj["matrix"], name=obj.get("name", ""))
        raise MetricError(f"unknown instance kind: {kind!r}")

    @classmethod
    def load(cls, path: str | Path) -> "MetricInstance":
        return cls.from_json(json.loads(Path(path).read_text()))


def metric_stats(instance: MetricInstance) -> MetricStats:
    """Exact diameter, minimum interpoint distance and aspect ratio."""
    n = instance.n
    if n < 2:
        return MetricStats(diameter=0.0, min_interpoint=0.0, aspect_ratio=1.0)
    d = instance.dmatrix
    off = d[~np.eye(n, dtype=bool)]
    diameter = float(off.max())
    min_inter = float(off.min())
    return MetricStats(diameter=diameter, min_interpoint=min_inter, aspect_ratio=diameter / min_inter)


def ball_members(instance: MetricInstance, ball: Ball) -> list[int]:
    """Points within the closed ball (distance <= radius, with tolerance)."""
    if not 0 <= ball.center < instance.n:
        raise MetricError(f"invalid ball center {ball.center}")
    row = instance.dmatrix[ball.center]
    return [int(i) for i in np.flatnonzero(row <= ball.radius + TOL)]


def build_net(
    instance: MetricInstance,
    subset: Iterable[int],
    alpha: float,
    seeds: Iterable[int] = (),
) -> list[int]:
    """Greedy alpha-net of `subset`: scan in ascending id, keep points > alpha
    from everything already chosen.

    `seeds` are considered first (in the given order) so that coarser nets can
    be threaded through finer ones; seeds closer than alpha to an earlier seed
    are skipped.
    """
    if alpha < 0:
        raise MetricError("alpha must be non-negative")
    sub = sorted(set(subset))
    if not sub:
        raise MetricError("subset must be non-empty")
    subset_set = set(sub)
    d = instance.dmatrix
    net: list[int] = []
    for p in list(seeds) + sub:
        if p not in subset_set:
            continue
        if all(d[p, q] > alpha + TOL for q in net):
            if p not in net:
                net.append(p)
    return net


def verify_net(
    instance: MetricInstance,
    subset: Iterable[int],
    net: Iterable[int],
    alpha: float,
) -> dict[str, bool]:
    """Check covering (every subset point within alpha of the net) and packing
    (net points pairwise strictly further than alpha apart)."""
    sub = sorted(set(subset))
    nt = sorted(set(net))
    if not set(nt) <= set(sub):
        raise MetricError("net must be a subset of the covered set")
    d = instance.dmatrix
    if nt:
        covering = all(min(d[x, y] for y in nt) <= alpha + TOL for x in sub)
    else:
        covering = not sub
    packing = all(d[a, b] > alpha + TOL for i, a in enumerate(nt) for b in nt[i + 1:])
    return {"is_covering": covering, "is_packing": packing}


def estimate_doubling_dimension(instance: MetricInstance) -> int:
    """Upper-bound estimate of the doubling dimension.

    For each ball B(x, 2r) with r drawn from half the pairwise distances, the
    greedy r-net of B's members must have size <= 2^k; returns the smallest
    integer k that works for all scanned balls.
    """
    n = instance.n
    if n <= 1:
        return 0
    d = instance.dmatrix
    worst = 1
    for x in range(n):
        radii = sorted(set(float(v) / 2.0 for v in d[x] if v > 0))
        for r in radii:
            members = np.flatnonzero(d[x] <= 2 * r + TOL)
            if len(members) <= worst:
                continue
            # Greedy r-net over the members, ascending id.
            net: list[int] = []
            for p in members:
                if all(d[p, q] > r + TOL for q in net):
                    net.append(int(p))
            worst = max(worst, len(net))
    k = 0
    while (1 << k) < worst:
        k += 1
    return k
