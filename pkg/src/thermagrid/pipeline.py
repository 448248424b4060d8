"""simulate -> detect -> relocate -> re-evaluate, the source-count sweep, and report files."""
from __future__ import annotations

import copy
import json
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .config import RunConfig, config_from_dict
from .geometry import manhattan_distance
from .hotspot import (HotspotReport, Hot, SummaryTable, ThermalField, compute_excess,
                      compute_field, compute_threshold, detect_hotspots, summarize)
from .meshing import MeshClass, ProbeSet, assemble_probes, coarse_grid, generate_sources
from .relocation import apply_relocation, evaluate_plan, plan_relocation
from .thermal_model import HeatSource, effective_conductivity, temperature

log = logging.getLogger(__name__)


@dataclass
class RunArtifact:
    config: dict
    report: dict
    sources: list[dict]
    thermal: Optional[dict] = None
    relocation: Optional[dict] = None
    timings: dict = field(default_factory=dict, compare=False)

    def hotspot_report(self) -> HotspotReport:
        r = self.report
        return HotspotReport(
            threshold=r["threshold"], n_sources=r["n_sources"],
            fm_points=r["fm_probes"], cm_points=r["cm_probes"],
            fm_hotspots=r["fm_hotspots"], cm_hotspots=r["cm_hotspots"],
            hottest=[Hot(h["index"], tuple(h["position"]), h["mesh_class"], h["power"]) for h in r["hottest"]],
        )

    def to_json(self) -> str:
        d = asdict(self)
        d.pop("timings")
        return json.dumps(d, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunArtifact":
        return cls(**json.loads(text))


@dataclass
class RunState:
    """In-memory products of a run, for callers that want the arrays."""
    sources: list[HeatSource]
    field: ThermalField
    threshold: float
    report: HotspotReport
    final_sources: Optional[list[HeatSource]] = None
    final_field: Optional[ThermalField] = None


def _src_dicts(sources: Sequence[HeatSource]) -> list[dict]:
    return [{"position": list(s.position), "strength": s.strength} for s in sources]


def _report_dict(rep: HotspotReport, wk_eff: Optional[float]) -> dict:
    d = rep.row()
    d["hottest"] = []
    for h in rep.hottest:
        e = {"index": h.index, "position": list(h.position), "mesh_class": h.mesh_class, "power": h.power}
        if wk_eff is not None:
            e["temperature"] = temperature(h.power, wk_eff)
        d["hottest"].append(e)
    return d


def resolve_sources(cfg: RunConfig) -> list[HeatSource]:
    explicit = cfg.explicit_sources()
    if explicit is not None:
        return explicit
    chip = cfg.chip()
    margin = cfg.placement_margin()
    region = chip.inset(margin) if margin > 0 else chip
    return generate_sources(cfg.source_config(), region)


def _evaluate(cfg: RunConfig, sources, coarse: ProbeSet) -> tuple[ThermalField, float]:
    probes = assemble_probes(sources, cfg.mesh_spec(), cfg.chip(), coarse=coarse)
    f = compute_field(probes, sources)
    t = cfg.hotspot.threshold if cfg.hotspot.threshold is not None else compute_threshold(f)
    return f, t


def execute(cfg: RunConfig, coarse: Optional[ProbeSet] = None) -> tuple[RunArtifact, RunState]:
    timings: dict[str, float] = {}
    clock = time.perf_counter()

    def lap(name: str) -> None:
        nonlocal clock
        now = time.perf_counter()
        timings[name] = now - clock
        clock = now

    sources = resolve_sources(cfg)
    if coarse is None:
        coarse = coarse_grid(cfg.chip(), cfg.mesh_spec().coarse_divisions)
    lap("setup")
    fld, threshold = _evaluate(cfg, sources, coarse)
    lap("field")
    report = detect_hotspots(fld, threshold, cfg.hotspot.top_k)
    lap("hotspots")
    log.info("%d sources, %d probes, threshold %.6g, %d FM / %d CM hotspots",
             len(sources), len(fld.probes), threshold, report.fm_hotspots, report.cm_hotspots)

    stack = cfg.layer_stack()
    wk_eff = effective_conductivity(stack) if stack is not None else None
    thermal = None
    if wk_eff is not None:
        thermal = {
            "wk_eff": wk_eff,
            "threshold_temperature": temperature(threshold, wk_eff),
            "max_temperature": temperature(float(fld.power.max()), wk_eff),
        }

    state = RunState(sources, fld, threshold, report)
    relocation = None
    if cfg.relocation.enabled:
        relocation = _relocate(cfg, state, coarse, wk_eff)
        lap("relocation")

    artifact = RunArtifact(
        config=cfg.to_dict(),
        report=_report_dict(report, wk_eff),
        sources=_src_dicts(sources),
        thermal=thermal,
        relocation=relocation,
        timings=timings,
    )
    return artifact, state


def _relocate(cfg: RunConfig, state: RunState, coarse: ProbeSet, wk_eff) -> dict:
    ro = cfg.relocation
    cap = ro.cap_per_source if ro.prune else None
    cur_sources, cur_field, cur_t = state.sources, state.field, state.threshold
    steps = []
    for _ in range(ro.iterations):
        excess = compute_excess(cur_field, cur_t)
        plan, _cands = plan_relocation(cur_field, excess, cur_sources, cap_per_source=cap)
        moved = apply_relocation(cur_sources, plan)
        steps.append({
            "total_cost": plan.total_cost,
            "moves": [
                {"source_index": i, "old_position": list(s.position), "new_position": list(t.position),
                 "manhattan_cost": c, "target_probe": p}
                for i, (s, t, c, p) in enumerate(zip(cur_sources, moved, plan.per_edge_cost, plan.target_probe))
            ],
        })
        cur_sources = moved
        cur_field, t_next = _evaluate(cfg, cur_sources, coarse)
        cur_t = t_next
    metrics = evaluate_plan(state.field, cur_field, threshold=state.threshold)
    state.final_sources, state.final_field = cur_sources, cur_field
    moves = []
    for i, (s0, s1) in enumerate(zip(state.sources, cur_sources)):
        moves.append({"source_index": i, "old_position": list(s0.position),
                      "new_position": list(s1.position),
                      "manhattan_cost": manhattan_distance(s0.position, s1.position)})
    m = asdict(metrics)
    if wk_eff is not None:
        m["max_temperature_before"] = temperature(metrics.before.max_power, wk_eff)
        m["max_temperature_after"] = temperature(metrics.after.max_power, wk_eff)
    return {
        "moves": moves,
        "total_cost": float(sum(mv["manhattan_cost"] for mv in moves)),
        "metrics": m,
        "steps": steps,
    }


def run_simulation(cfg: RunConfig) -> RunArtifact:
    artifact, state = execute(cfg)
    emit_reports(artifact, cfg, state)
    return artifact


def run_sweep(cfg: RunConfig, counts: Sequence[int]) -> SummaryTable:
    """One run per source count, seeds ``seed + index``; relocation is skipped."""
    if not counts:
        raise ValueError("run_sweep needs at least one source count")
    if cfg.sources.explicit is not None:
        raise ValueError("run_sweep draws random sources; explicit sources are not allowed")
    coarse = coarse_grid(cfg.chip(), cfg.mesh_spec().coarse_divisions)
    reports = []
    for idx, n in enumerate(counts):
        d = cfg.to_dict()
        d["sources"]["count"] = int(n)
        d["sources"]["seed"] = cfg.sources.seed + idx
        d["relocation"]["enabled"] = False
        sub = config_from_dict(d)
        artifact, _ = execute(sub, coarse=coarse)
        reports.append(artifact.hotspot_report())
    table = summarize(reports)
    if cfg.output.summary_csv:
        _write(cfg.output.summary_csv, table.to_csv())
    return table


def _write(path: str, text: str) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text)


def write_probe_dump(path: str, fld: ThermalField, threshold: float, wk_eff: Optional[float] = None,
                     chunk: int = 1 << 16) -> None:
    names = np.array([c.name for c in MeshClass])
    cols = "x,y,z,mesh_class,power,excess" + (",temperature" if wk_eff is not None else "")
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with p.open("w") as fh:
        fh.write(cols + "\n")
        pos, pw, mc = fld.probes.positions, fld.power, fld.probes.mesh_class
        for i0 in range(0, len(pw), chunk):
            sl = slice(i0, i0 + chunk)
            lines = []
            for (x, y, z), c, w in zip(pos[sl].tolist(), names[mc[sl]].tolist(), pw[sl].tolist()):
                row = f"{x!r},{y!r},{z!r},{c},{w!r},{threshold - w!r}"
                if wk_eff is not None:
                    row += f",{w / wk_eff!r}"
                lines.append(row)
            fh.write("\n".join(lines) + "\n")


def emit_reports(artifact: RunArtifact, cfg: RunConfig, state: Optional[RunState] = None) -> None:
    out = cfg.output
    if out.summary_csv:
        _write(out.summary_csv, summarize([artifact.hotspot_report()]).to_csv())
    if out.artifact_json:
        _write(out.artifact_json, artifact.to_json())
    if out.timings_json:
        _write(out.timings_json, json.dumps(artifact.timings, indent=2, sort_keys=True) + "\n")
    if out.probe_dump:
        if state is None:
            raise ValueError("probe dump needs the in-memory field")
        wk = artifact.thermal["wk_eff"] if artifact.thermal else None
        write_probe_dump(out.probe_dump, state.field, state.threshold, wk)
