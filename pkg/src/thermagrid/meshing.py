"""Seeded source placement and the probe set (source points, fine grids, coarse grid)."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import Box3, Point3, contains_many
from .thermal_model import HeatSource


class MeshClass(enum.IntEnum):
    SOURCE = 0
    FINE = 1
    COARSE = 2


NO_OWNER = -1


@dataclass(frozen=True)
class MeshSpec:
    coarse_divisions: tuple[int, int, int] = (200, 100, 100)
    fine_resolution: int = 18
    fine_extent: float = 1.0

    def __post_init__(self):
        div = tuple(int(n) for n in self.coarse_divisions)
        if len(div) != 3 or min(div) < 1:
            raise ValueError(f"coarse_divisions must be three counts >= 1, got {self.coarse_divisions!r}")
        object.__setattr__(self, "coarse_divisions", div)
        if int(self.fine_resolution) < 1:
            raise ValueError(f"fine_resolution must be >= 1, got {self.fine_resolution!r}")
        object.__setattr__(self, "fine_resolution", int(self.fine_resolution))
        if not (math.isfinite(self.fine_extent) and self.fine_extent > 0):
            raise ValueError(f"fine_extent must be > 0, got {self.fine_extent!r}")


@dataclass(frozen=True)
class SourceConfig:
    count: int
    strength_range: tuple[float, float] = (1.0, 1.0)
    seed: int = 0

    def __post_init__(self):
        if int(self.count) < 1:
            raise ValueError(f"count must be >= 1, got {self.count!r}")
        lo, hi = (float(v) for v in self.strength_range)
        if not (math.isfinite(lo) and math.isfinite(hi) and 0 < lo <= hi):
            raise ValueError(f"strength_range must satisfy 0 < min <= max, got {self.strength_range!r}")
        object.__setattr__(self, "strength_range", (lo, hi))
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed!r}")


@dataclass(frozen=True)
class ProbePoint:
    position: Point3
    mesh_class: MeshClass
    owner_source: Optional[int] = None

    def __post_init__(self):
        if (self.owner_source is None) != (self.mesh_class == MeshClass.COARSE):
            raise ValueError("owner_source must be set exactly for SOURCE and FINE probes")


class ProbeSet:
    """Column store of probe points.

    Millions of probes are normal, so positions, classes and owners live in
    parallel arrays; indexing yields a :class:`ProbePoint`.
    """

    def __init__(self, positions: np.ndarray, mesh_class: np.ndarray, owner: np.ndarray):
        self.positions = np.ascontiguousarray(positions, dtype=float).reshape(-1, 3)
        self.mesh_class = np.asarray(mesh_class, dtype=np.int8)
        self.owner = np.asarray(owner, dtype=np.int64)
        if not (len(self.positions) == len(self.mesh_class) == len(self.owner)):
            raise ValueError("probe arrays differ in length")

    def __len__(self) -> int:
        return len(self.positions)

    def __getitem__(self, i: int) -> ProbePoint:
        cls = MeshClass(int(self.mesh_class[i]))
        owner = None if cls == MeshClass.COARSE else int(self.owner[i])
        return ProbePoint(Point3.of(self.positions[i]), cls, owner)

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def mask(self, cls: MeshClass) -> np.ndarray:
        return self.mesh_class == cls

    def count(self, cls: MeshClass) -> int:
        return int(np.count_nonzero(self.mask(cls)))

    @classmethod
    def concat(cls, parts: Sequence["ProbeSet"]) -> "ProbeSet":
        if not parts:
            return cls(np.empty((0, 3)), np.empty(0), np.empty(0))
        return cls(
            np.concatenate([p.positions for p in parts]),
            np.concatenate([p.mesh_class for p in parts]),
            np.concatenate([p.owner for p in parts]),
        )


def generate_sources(cfg: SourceConfig, box: Box3) -> list[HeatSource]:
    """Uniform i.i.d. positions in ``box`` and strengths in the configured range.

    Uses numpy's PCG64 seeded with ``cfg.seed``; positions are drawn first
    (count x 3, row-major), then strengths.
    """
    rng = np.random.Generator(np.random.PCG64(int(cfg.seed)))
    u = rng.random((cfg.count, 3))
    pos = box.lo + u * np.asarray(box.dims)
    # guard against round-up onto/over the far face
    pos = np.minimum(pos, box.hi)
    lo, hi = cfg.strength_range
    if lo == hi:
        q = np.full(cfg.count, lo)
    else:
        q = lo + rng.random(cfg.count) * (hi - lo)
        q = np.clip(q, lo, hi)
    return [HeatSource(Point3.of(p), float(s)) for p, s in zip(pos, q)]


def _centers(lo: float, length: float, n: int) -> np.ndarray:
    return lo + (np.arange(n) + 0.5) * (length / n)


def _lattice(axes: Sequence[np.ndarray]) -> np.ndarray:
    gx, gy, gz = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel(), gz.ravel()])


def coarse_grid(box: Box3, divisions: tuple[int, int, int]) -> ProbeSet:
    if len(divisions) != 3 or min(int(n) for n in divisions) < 1:
        raise ValueError(f"coarse divisions must be three counts >= 1, got {divisions!r}")
    axes = [_centers(box.lo[k], box.dims[k], int(divisions[k])) for k in range(3)]
    pts = _lattice(axes)
    n = len(pts)
    return ProbeSet(pts, np.full(n, MeshClass.COARSE), np.full(n, NO_OWNER))


def fine_grid(source: HeatSource, spec: MeshSpec, box: Box3, owner: int = 0) -> ProbeSet:
    """Cell-centre lattice filling the cube of half-width ``fine_extent`` around a source, clipped to ``box``."""
    r, e = spec.fine_resolution, spec.fine_extent
    c = source.position.as_array()
    axes = [_centers(c[k] - e, 2.0 * e, r) for k in range(3)]
    if r == 1:
        # exact centre, no round-off from c - e + e
        axes = [np.array([c[k]]) for k in range(3)]
    pts = _lattice(axes)
    pts = pts[contains_many(box, pts)]
    n = len(pts)
    return ProbeSet(pts, np.full(n, MeshClass.FINE), np.full(n, owner))


def assemble_probes(sources: Sequence[HeatSource], spec: MeshSpec, box: Box3,
                    coarse: Optional[ProbeSet] = None) -> ProbeSet:
    """SOURCE probes, then every fine grid in source order, then the coarse grid.

    A precomputed ``coarse`` grid may be passed to reuse it across runs.
    """
    src_pos = np.array([tuple(s.position) for s in sources], dtype=float).reshape(-1, 3)
    n = len(sources)
    parts = [ProbeSet(src_pos, np.full(n, MeshClass.SOURCE), np.arange(n))]
    parts += [fine_grid(s, spec, box, owner=i) for i, s in enumerate(sources)]
    parts.append(coarse if coarse is not None else coarse_grid(box, spec.coarse_divisions))
    return ProbeSet.concat(parts)
