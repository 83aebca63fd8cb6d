"""Seed-deterministic instance generators for the benchmark harness."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .metric import MetricError, MetricInstance

KINDS = ("uniform-cube", "grid", "gaussian-clusters", "line", "matrix-file")


@dataclass
class GeneratorSpec:
    kind: str
    n: int = 0
    dim: int = 2
    clusters: int = 3
    spread: float = 0.05
    seed: int = 0
    path: str | None = None  # matrix-file only

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}; choose from {KINDS}")
        if self.kind != "matrix-file":
            if self.n < 1:
                raise ValueError("n must be positive")
            if self.dim not in (1, 2, 3):
                raise ValueError("dim must be 1, 2, or 3")
        elif not self.path:
            raise ValueError("matrix-file generator needs a path")

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n, "dim": self.dim,
                "clusters": self.clusters, "spread": self.spread,
                "seed": self.seed, "path": self.path}


def generate_instance(spec: GeneratorSpec, seed: int | None = None) -> MetricInstance:
    """Instance for `spec`; the explicit seed argument overrides spec.seed."""
    s = spec.seed if seed is None else seed
    rng = np.random.default_rng(s)
    name = f"{spec.kind}-n{spec.n}-d{spec.dim}-s{s}"
    if spec.kind == "uniform-cube":
        pts = rng.random((spec.n, spec.dim))
        return MetricInstance.euclidean(pts, name=name)
    if spec.kind == "grid":
        side = max(1, math.ceil(spec.n ** (1.0 / spec.dim) - 1e-9))
        axes = [np.arange(side, dtype=float)] * spec.dim
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, spec.dim)
        return MetricInstance.euclidean(mesh[: spec.n], name=name)
    if spec.kind == "gaussian-clusters":
        centers = rng.random((max(1, spec.clusters), spec.dim))
        idx = rng.integers(0, len(centers), size=spec.n)
        pts = centers[idx] + rng.normal(scale=spec.spread, size=(spec.n, spec.dim))
        return MetricInstance.euclidean(pts, name=name)
    if spec.kind == "line":
        pts = np.arange(spec.n, dtype=float).reshape(-1, 1)
        return MetricInstance.euclidean(pts, name=name)
    # matrix-file
    try:
        return MetricInstance.load(Path(spec.path))
    except MetricError:
        raise
    except Exception as exc:  # malformed file: surface a metric diagnostic
        raise MetricError(f"cannot read matrix file {spec.path}: {exc}") from exc


def default_suite(count: int, seed: int = 0, n_range: tuple[int, int] = (3, 60)) -> list[GeneratorSpec]:
    """Mixed generator specs (kinds and dims cycled, sizes drawn uniformly)
    used by the feasibility sweep."""
    rng = np.random.default_rng(seed)
    kinds = ["uniform-cube", "gaussian-clusters", "grid", "line"]
    specs = []
    for i in range(count):
        kind = kinds[i % len(kinds)]
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        dim = 1 if kind == "line" else int(rng.integers(1, 4))
        if kind == "grid":
            # Snap to a full lattice so members line up on the grid.
            side = max(2, round(n ** (1.0 / dim)))
            n = side ** dim
            n = min(n, n_range[1]) if side > 1 else n
        specs.append(GeneratorSpec(kind=kind, n=max(n, n_range[0]), dim=dim,
                                   seed=int(rng.integers(0, 2 ** 31))))
    return specs
