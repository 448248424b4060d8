"""Move sources onto cool probe positions with minimum total Manhattan displacement.

Sources form one side of a complete bipartite graph, eligible cool probes the
other; edge weights are Manhattan distances and the solver returns a
minimum-weight matching that covers every source.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .geometry import Point3, manhattan_many
from .hotspot import ExcessField, ThermalField, compute_threshold
from .meshing import MeshClass
from .thermal_model import HeatSource

DEFAULT_CAP = 64


class InfeasibleMatching(ValueError):
    """Fewer candidate targets than sources: no matching covers the source side."""


@dataclass
class CandidateSet:
    probe_index: np.ndarray   # indices into the field's probe set, ascending
    positions: np.ndarray     # (k, 3)
    excess: np.ndarray

    def __len__(self) -> int:
        return len(self.probe_index)

    def subset(self, rows: np.ndarray) -> "CandidateSet":
        return CandidateSet(self.probe_index[rows], self.positions[rows], self.excess[rows])


@dataclass
class CostMatrix:
    values: np.ndarray        # rows = sources, cols = candidates

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass
class RelocationPlan:
    assignment: list[int]                 # source i -> column in the candidate set
    targets: list[tuple[float, float, float]]
    target_probe: list[int]
    per_edge_cost: list[float]
    total_cost: float


def eligible_targets(excess: ExcessField, field: ThermalField) -> CandidateSet:
    """Empty probe positions whose excess is at least the largest source excess.

    Empty means neither a SOURCE probe nor a grid point that coincides with
    a source position.
    """
    cls = field.probes.mesh_class
    src = cls == MeshClass.SOURCE
    if not src.any():
        raise ValueError("field has no SOURCE probes")
    floor = excess.excess[src].max()
    idx = np.flatnonzero(~src & (excess.excess >= floor))
    pos = field.probes.positions[idx]
    free = np.ones(len(idx), dtype=bool)
    for sp in field.probes.positions[src]:
        free &= ~np.all(pos == sp, axis=1)
    idx = idx[free]
    return CandidateSet(idx, field.probes.positions[idx], excess.excess[idx])


def _nearest(d: np.ndarray, tiebreak: np.ndarray, k: int) -> np.ndarray:
    """Row numbers of the ``k`` smallest ``d``, ties resolved by ``tiebreak``."""
    if k >= len(d):
        return np.arange(len(d))
    kth = np.partition(d, k - 1)[k - 1]
    sel = np.flatnonzero(d <= kth)
    return sel[np.lexsort((tiebreak[sel], d[sel]))][:k]


def prune_candidates(cands: CandidateSet, sources: Sequence[HeatSource], cap_per_source: int) -> CandidateSet:
    """Union of each source's ``cap_per_source`` Manhattan-nearest candidates."""
    if cap_per_source < 1:
        raise ValueError(f"cap_per_source must be >= 1, got {cap_per_source}")
    if len(cands) == 0:
        return cands
    keep = np.zeros(len(cands), dtype=bool)
    for s in sources:
        d = manhattan_many(s.position.as_array(), cands.positions)
        keep[_nearest(d, cands.probe_index, cap_per_source)] = True
    return cands.subset(np.flatnonzero(keep))


def build_cost_matrix(sources: Sequence[HeatSource], cands: CandidateSet) -> CostMatrix:
    if len(cands) == 0:
        raise InfeasibleMatching("no candidate targets")
    rows = [manhattan_many(s.position.as_array(), cands.positions) for s in sources]
    return CostMatrix(np.vstack(rows) if rows else np.empty((0, len(cands))))


def _hungarian(c: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rectangular assignment (rows <= cols) by shortest augmenting paths.

    Returns the row->column assignment and the final row/column potentials
    ``u``, ``v``; ``c[i, j] - u[i] - v[j] >= 0`` with equality on matched edges
    and ``v <= 0`` with ``v < 0`` only on matched columns.
    """
    n, m = c.shape
    u = np.zeros(n + 1)
    v = np.zeros(m + 1)
    p = np.zeros(m + 1, dtype=np.int64)      # column -> row (1-based), 0 = free
    way = np.zeros(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(m + 1, np.inf)
        used = np.zeros(m + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used[1:]
            cur = c[i0 - 1] - u[i0] - v[1:]
            better = free & (cur < minv[1:])
            minv[1:][better] = cur[better]
            way[1:][better] = j0
            masked = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(masked)) + 1
            delta = masked[j1 - 1]
            cols = np.flatnonzero(used)
            u[p[cols]] += delta
            v[cols] -= delta
            minv[1:][free] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    assign = np.empty(n, dtype=np.int64)
    for j in range(1, m + 1):
        if p[j]:
            assign[p[j] - 1] = j - 1
    return assign, u[1:], v[1:]


def _solve_sub(c: np.ndarray, rows: np.ndarray, cols: np.ndarray):
    if len(rows) == 0:
        return np.empty(0, dtype=np.int64), np.empty(0), np.zeros(len(cols)), 0.0
    sub = c[np.ix_(rows, cols)]
    a, u, v = _hungarian(sub)
    return cols[a], u, v, float(sub[np.arange(len(rows)), a].sum())


def min_weight_matching(costs: CostMatrix) -> RelocationPlan:
    """Exact min-cost assignment of every row to a distinct column.

    Among optimal assignments the lexicographically smallest one (row 0's
    column first) is returned.
    """
    c = np.asarray(costs.values, dtype=float)
    n, m = c.shape
    if m < n:
        raise InfeasibleMatching(f"no perfect matching on the source side: {n} sources, {m} targets")
    if not np.all(np.isfinite(c)):
        raise ValueError("cost matrix must be finite")
    if n == 0:
        return RelocationPlan([], [], [], [], 0.0)

    all_rows, all_cols = np.arange(n), np.arange(m)
    assign, u, v_sub, best = _solve_sub(c, all_rows, all_cols)
    v = v_sub.copy()
    # round-off allowance for "equal cost"; potentials accumulate O(n) updates
    scale = max(1.0, float(np.abs(c).max()))
    tight_tol = cost_tol = 1e-13 * scale * (n + 1)

    avail = np.ones(m, dtype=bool)
    fixed_cost = 0.0
    for i in range(n):
        cur = assign[i]
        cand = np.flatnonzero(avail[:cur] & (c[i, :cur] - u[i] - v[:cur] <= tight_tol))
        for j in cand:
            rest = all_rows[i + 1:]
            avail[j] = False
            cols = np.flatnonzero(avail)
            a, ur, vr, sub_cost = _solve_sub(c, rest, cols)
            avail[j] = True
            if abs(fixed_cost + c[i, j] + sub_cost - best) <= cost_tol:
                assign[i] = j
                assign[i + 1:] = a
                u[i + 1:] = ur
                v[cols] = vr
                break
        avail[assign[i]] = False
        fixed_cost += c[i, assign[i]]

    per_edge = [float(c[i, assign[i]]) for i in range(n)]
    return RelocationPlan(
        assignment=[int(j) for j in assign],
        targets=[],
        target_probe=[],
        per_edge_cost=per_edge,
        total_cost=math.fsum(per_edge),
    )


def plan_relocation(field: ThermalField, excess: ExcessField, sources: Sequence[HeatSource],
                    cap_per_source: Optional[int] = DEFAULT_CAP) -> tuple[RelocationPlan, CandidateSet]:
    """Eligible targets -> optional pruning -> cost matrix -> matching.

    ``cap_per_source=None`` disables pruning.  When the pruned union is
    smaller than the number of sources the cap is doubled until it is not.
    """
    cands = eligible_targets(excess, field)
    if len(cands) < len(sources):
        raise InfeasibleMatching(
            f"no perfect matching on the source side: {len(sources)} sources, {len(cands)} eligible targets")
    if cap_per_source is not None:
        cap = cap_per_source
        while True:
            pruned = prune_candidates(cands, sources, cap)
            if len(pruned) >= len(sources):
                break
            cap *= 2
        cands = pruned
    plan = min_weight_matching(build_cost_matrix(sources, cands))
    plan.targets = [tuple(float(x) for x in cands.positions[j]) for j in plan.assignment]
    plan.target_probe = [int(cands.probe_index[j]) for j in plan.assignment]
    return plan, cands


def apply_relocation(sources: Sequence[HeatSource], plan: RelocationPlan) -> list[HeatSource]:
    if len(plan.targets) != len(sources):
        raise ValueError(f"plan covers {len(plan.targets)} sources, got {len(sources)}")
    return [HeatSource(Point3.of(t), s.strength) for s, t in zip(sources, plan.targets)]


@dataclass
class FieldStats:
    max_power: float
    mean_power: float
    var_power: float
    max_coarse_power: float
    fm_hotspots: int
    cm_hotspots: int

    @classmethod
    def of(cls, f: ThermalField, threshold: float) -> "FieldStats":
        mc = f.probes.mesh_class
        hot = f.power > threshold
        coarse = mc == MeshClass.COARSE
        return cls(
            max_power=float(f.power.max()),
            mean_power=float(f.power.mean()),
            var_power=float(f.power.var()),
            max_coarse_power=float(f.power[coarse].max()) if coarse.any() else 0.0,
            fm_hotspots=int((hot & (mc == MeshClass.FINE)).sum()),
            cm_hotspots=int((hot & coarse).sum()),
        )


@dataclass
class RelocationMetrics:
    threshold: float
    before: FieldStats
    after: FieldStats
    delta: dict = field(default_factory=dict)


def evaluate_plan(before: ThermalField, after: ThermalField, threshold: Optional[float] = None) -> RelocationMetrics:
    """Before/after statistics; hotspots in both fields count against one threshold.

    The threshold defaults to the one of ``before``.  Both fields must share
    the same coarse grid; fine grids may differ since they follow the sources.
    """
    cb = before.probes.positions[before.probes.mask(MeshClass.COARSE)]
    ca = after.probes.positions[after.probes.mask(MeshClass.COARSE)]
    if cb.shape != ca.shape or not np.array_equal(cb, ca) or before.n_sources != after.n_sources:
        raise ValueError("before/after fields do not share the same coarse grid and source count")
    t = compute_threshold(before) if threshold is None else float(threshold)
    b, a = FieldStats.of(before, t), FieldStats.of(after, t)
    delta = {k: getattr(a, k) - getattr(b, k) for k in b.__dataclass_fields__}
    return RelocationMetrics(t, b, a, delta)
