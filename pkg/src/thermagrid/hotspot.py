"""Field evaluation, threshold, hotspots, excess and the sweep summary table."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .meshing import MeshClass, ProbeSet
from .thermal_model import HeatSource, power_at

SUMMARY_HEADER = (
    "n_sources", "threshold", "total_probes", "fm_probes", "cm_probes",
    "fm_hotspots", "cm_hotspots", "fm_pct", "cm_pct",
)

DEFAULT_TOP_K = 20


@dataclass
class ThermalField:
    probes: ProbeSet
    power: np.ndarray
    n_sources: int

    def __post_init__(self):
        self.power = np.asarray(self.power, dtype=float)
        if len(self.power) != len(self.probes):
            raise ValueError("ThermalField: one power value per probe required")

    def scaled(self, a: float) -> "ThermalField":
        return ThermalField(self.probes, self.power * a, self.n_sources)


@dataclass
class ExcessField:
    excess: np.ndarray
    threshold: float


@dataclass
class Hot:
    index: int
    position: tuple[float, float, float]
    mesh_class: str
    power: float


@dataclass
class HotspotReport:
    threshold: float
    n_sources: int
    fm_points: int
    cm_points: int
    fm_hotspots: int
    cm_hotspots: int
    hottest: list[Hot] = field(default_factory=list)

    @property
    def total_points(self) -> int:
        return self.fm_points + self.cm_points

    @property
    def fm_pct(self) -> float:
        return self.fm_hotspots / self.total_points if self.total_points else 0.0

    @property
    def cm_pct(self) -> float:
        return self.cm_hotspots / self.total_points if self.total_points else 0.0

    def row(self) -> dict:
        return {
            "n_sources": self.n_sources, "threshold": self.threshold,
            "total_probes": self.total_points, "fm_probes": self.fm_points,
            "cm_probes": self.cm_points, "fm_hotspots": self.fm_hotspots,
            "cm_hotspots": self.cm_hotspots, "fm_pct": self.fm_pct, "cm_pct": self.cm_pct,
        }


def compute_field(probes: ProbeSet, sources: Sequence[HeatSource], threads: int | None = None) -> ThermalField:
    if not sources:
        raise ValueError("compute_field needs at least one source")
    return ThermalField(probes, power_at(probes.positions, sources, threads=threads), len(sources))


def compute_threshold(field: ThermalField) -> float:
    """Minimum cumulative power over SOURCE probes."""
    m = field.probes.mask(MeshClass.SOURCE)
    if not m.any():
        raise ValueError("field has no SOURCE probes; threshold undefined")
    return float(field.power[m].min())


def hottest(field: ThermalField, k: int = DEFAULT_TOP_K) -> list[Hot]:
    """Top-``k`` probes by power; ties go to the lower probe index."""
    n = len(field.power)
    k = min(k, n)
    if k <= 0:
        return []
    if k < n:
        kth = np.partition(field.power, n - k)[n - k]
        cand = np.flatnonzero(field.power >= kth)
    else:
        cand = np.arange(n)
    order = cand[np.lexsort((cand, -field.power[cand]))][:k]
    return [
        Hot(int(i), tuple(float(v) for v in field.probes.positions[i]),
            MeshClass(int(field.probes.mesh_class[i])).name, float(field.power[i]))
        for i in order
    ]


def detect_hotspots(field: ThermalField, threshold: float, top_k: int = DEFAULT_TOP_K) -> HotspotReport:
    """Count FINE and COARSE probes with power strictly above ``threshold``."""
    if not threshold > 0:
        raise ValueError(f"threshold must be > 0, got {threshold!r}")
    cls = field.probes.mesh_class
    hot = field.power > threshold
    fine = cls == MeshClass.FINE
    coarse = cls == MeshClass.COARSE
    return HotspotReport(
        threshold=float(threshold),
        n_sources=field.n_sources,
        fm_points=int(fine.sum()),
        cm_points=int(coarse.sum()),
        fm_hotspots=int((hot & fine).sum()),
        cm_hotspots=int((hot & coarse).sum()),
        hottest=hottest(field, top_k),
    )


def compute_excess(field: ThermalField, threshold: float) -> ExcessField:
    return ExcessField(threshold - field.power, float(threshold))


@dataclass
class SummaryTable:
    rows: list[dict]

    def __len__(self) -> int:
        return len(self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=SUMMARY_HEADER, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SummaryTable":
        rows = []
        for r in csv.DictReader(io.StringIO(text)):
            rows.append({k: (float(v) if k in ("threshold", "fm_pct", "cm_pct") else int(v))
                         for k, v in r.items()})
        return cls(rows)


def summarize(reports: Sequence[HotspotReport]) -> SummaryTable:
    # stable sort: repeated source counts (seed trials) keep their input order
    return SummaryTable([r.row() for r in sorted(reports, key=lambda r: r.n_sources)])
