"""Points, boxes and the two distance metrics used by the model.

Lengths are in chip units: 1.0 is the radius of the unit sphere around a
target point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"Point3.{name} must be finite, got {v!r}")
            object.__setattr__(self, name, float(v))

    def __iter__(self) -> Iterator[float]:
        yield self.x
        yield self.y
        yield self.z

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def of(cls, xyz) -> "Point3":
        x, y, z = xyz
        return cls(float(x), float(y), float(z))


@dataclass(frozen=True)
class Box3:
    """Axis-aligned box given by its minimum corner and edge lengths."""

    origin: Point3
    dims: tuple[float, float, float]

    def __post_init__(self):
        dims = tuple(float(d) for d in self.dims)
        if len(dims) != 3:
            raise ValueError("Box3.dims needs three lengths")
        for axis, d in zip("xyz", dims):
            if not (math.isfinite(d) and d > 0):
                raise ValueError(f"Box3.dims[{axis}] must be > 0, got {d!r}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_dims(cls, lx: float, ly: float, lz: float, origin=(0.0, 0.0, 0.0)) -> "Box3":
        return cls(Point3.of(origin), (lx, ly, lz))

    @property
    def lo(self) -> np.ndarray:
        return self.origin.as_array()

    @property
    def hi(self) -> np.ndarray:
        return self.lo + np.asarray(self.dims)

    @property
    def center(self) -> Point3:
        return Point3.of(self.lo + 0.5 * np.asarray(self.dims))

    def inset(self, margin: float) -> "Box3":
        """Shrink every face inward by ``margin``; raises if nothing is left."""
        dims = tuple(d - 2.0 * margin for d in self.dims)
        if min(dims) <= 0:
            raise ValueError(f"margin {margin} leaves an empty box for dims {self.dims}")
        return Box3(Point3.of(self.lo + margin), dims)


def euclidean_distance(a: Point3, b: Point3) -> float:
    dx = a.x - b.x
    dy = a.y - b.y
    dz = a.z - b.z
    return math.sqrt(dx * dx + dy * dy + dz * dz)


def manhattan_distance(a: Point3, b: Point3) -> float:
    return abs(a.x - b.x) + abs(a.y - b.y) + abs(a.z - b.z)


def contains(box: Box3, p: Point3) -> bool:
    # closed box: faces count as inside
    lo, hi = box.lo, box.hi
    return bool(lo[0] <= p.x <= hi[0] and lo[1] <= p.y <= hi[1] and lo[2] <= p.z <= hi[2])


def contains_many(box: Box3, pts: np.ndarray) -> np.ndarray:
    """Vectorised :func:`contains` over an (N, 3) array."""
    pts = np.asarray(pts, dtype=float)
    return np.all((pts >= box.lo) & (pts <= box.hi), axis=1)


def manhattan_many(p: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Manhattan distance from one point to each row of ``pts``."""
    d = np.abs(np.asarray(pts, dtype=float) - np.asarray(p, dtype=float))
    # same addition order as manhattan_distance
    return d[:, 0] + d[:, 1] + d[:, 2]
