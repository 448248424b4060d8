"""Unit-sphere heat contribution, superposition and layered conductivity.

A point source of strength Q seen from a target at distance d delivers the
share of its heat that lands inside the unit sphere around the target.  The
cap of the source sphere (radius d) cut by the unit sphere subtends

    tau(d) = 2*pi*(1 - cos(theta)),   cos(theta) = 1 - 1/(2 d^2)

so the received share is tau / (4*pi) = 1 / (4 d^2).  For d <= 0.5 the source
sphere lies wholly inside the unit sphere and the full Q is received.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import Point3, euclidean_distance

ENGULF_RADIUS = 0.5

# fixed chunking keeps the per-probe arithmetic independent of thread count
CHUNK = 1 << 16


@dataclass(frozen=True)
class HeatSource:
    position: Point3
    strength: float

    def __post_init__(self):
        q = float(self.strength)
        if not (math.isfinite(q) and q > 0):
            raise ValueError(f"HeatSource.strength must be > 0, got {self.strength!r}")
        object.__setattr__(self, "strength", q)


@dataclass(frozen=True)
class Layer:
    thickness: float      # cm
    conductivity: float   # W/(cm K)

    def __post_init__(self):
        for name in ("thickness", "conductivity"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"Layer.{name} must be > 0, got {v!r}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class LayerStack:
    layers: tuple[Layer, ...]

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ValueError("LayerStack needs at least one layer")
        object.__setattr__(self, "layers", layers)

    def __add__(self, other: "LayerStack") -> "LayerStack":
        return LayerStack(self.layers + other.layers)


# Conductivities quoted for the silicon / resin / oxide stack, W/(cm K).
K_SILICON = 0.72
K_RESIN = 0.0063
K_OXIDE = 0.017


def cap_solid_angle(d: float) -> float:
    """Solid angle of the source-sphere cap enclosed by the unit sphere.

    Only defined while the two spheres intersect (``d >= 0.5``).
    """
    if not math.isfinite(d) or d < ENGULF_RADIUS:
        raise ValueError(f"cap_solid_angle needs d >= {ENGULF_RADIUS}, got {d!r}")
    cos_theta = 1.0 - 1.0 / (2.0 * d * d)
    return 2.0 * math.pi * (1.0 - cos_theta)


def contribution(q: float, d: float) -> float:
    if not (math.isfinite(q) and q > 0):
        raise ValueError(f"strength must be finite and > 0, got {q!r}")
    if not (math.isfinite(d) and d >= 0):
        raise ValueError(f"distance must be finite and >= 0, got {d!r}")
    if d <= ENGULF_RADIUS:
        return q
    return q / (4.0 * d * d)


def cumulative_power(target: Point3, sources: Sequence[HeatSource]) -> float:
    if not sources:
        raise ValueError("cumulative_power needs at least one source")
    total = 0.0
    for s in sources:
        total += contribution(s.strength, euclidean_distance(target, s.position))
    return total


def effective_conductivity(stack: LayerStack) -> float:
    """Thickness-weighted conductivity sum, in W/K."""
    if not stack.layers:
        raise ValueError("empty layer stack")
    return math.fsum(layer.thickness * layer.conductivity for layer in stack.layers)


def temperature(p, wk_eff: float):
    """Power to temperature rise; works elementwise on arrays too."""
    if not (math.isfinite(wk_eff) and wk_eff > 0):
        raise ValueError(f"effective conductivity must be > 0, got {wk_eff!r}")
    return p / wk_eff


def source_arrays(sources: Sequence[HeatSource]) -> tuple[np.ndarray, np.ndarray]:
    pos = np.array([tuple(s.position) for s in sources], dtype=float).reshape(-1, 3)
    q = np.array([s.strength for s in sources], dtype=float)
    return pos, q


def thread_count() -> int:
    raw = os.environ.get("THERMAGRID_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"THERMAGRID_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"THERMAGRID_THREADS must be >= 0, got {n}")
    return n or (os.cpu_count() or 1)


def _power_chunk(pts: np.ndarray, src_pos: np.ndarray, src_q: np.ndarray) -> np.ndarray:
    acc = np.zeros(len(pts))
    # one source at a time, in list order, so each probe sums exactly like
    # cumulative_power does
    for (sx, sy, sz), q in zip(src_pos, src_q):
        dx = pts[:, 0] - sx
        dy = pts[:, 1] - sy
        dz = pts[:, 2] - sz
        d = np.sqrt(dx * dx + dy * dy + dz * dz)
        far = d > ENGULF_RADIUS
        c = np.full(len(pts), q)
        df = d[far]
        c[far] = q / (4.0 * df * df)
        acc += c
    return acc


def power_at(points: np.ndarray, sources: Sequence[HeatSource], threads: int | None = None) -> np.ndarray:
    """Cumulative power at every row of an (N, 3) array of positions."""
    if not sources:
        raise ValueError("power_at needs at least one source")
    pts = np.ascontiguousarray(points, dtype=float).reshape(-1, 3)
    src_pos, src_q = source_arrays(sources)
    out = np.empty(len(pts))
    starts = range(0, len(pts), CHUNK)

    def work(i0: int) -> None:
        out[i0:i0 + CHUNK] = _power_chunk(pts[i0:i0 + CHUNK], src_pos, src_q)

    n = thread_count() if threads is None else max(1, threads)
    if n == 1 or len(pts) <= CHUNK:
        for i0 in starts:
            work(i0)
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            list(pool.map(work, starts))
    return out
