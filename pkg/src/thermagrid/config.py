"""Run configuration: dataclasses, JSON loading, flag overrides and validation."""
from __future__ import annotations

import copy
import json
from dataclasses import MISSING, asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional

from .geometry import Box3, Point3, contains
from .meshing import MeshSpec, SourceConfig
from .relocation import DEFAULT_CAP
from .hotspot import DEFAULT_TOP_K
from .thermal_model import HeatSource, Layer, LayerStack


class ConfigError(ValueError):
    def __init__(self, field_name: str, msg: str):
        super().__init__(f"{field_name}: {msg}")
        self.field = field_name


@dataclass
class BoxOptions:
    dims: tuple[float, float, float]
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)


@dataclass
class SourceOptions:
    count: Optional[int] = None
    strength_range: tuple[float, float] = (1.0, 1.0)
    seed: int = 0
    # sources are drawn from the box shrunk by this much; None = fine_extent,
    # which keeps every fine grid unclipped
    margin: Optional[float] = None
    explicit: Optional[list[dict]] = None   # [{"position": [x, y, z], "strength": q}]


@dataclass
class MeshOptions:
    coarse_divisions: tuple[int, int, int] = (200, 100, 100)
    fine_resolution: int = 18
    fine_extent: float = 1.0


@dataclass
class HotspotOptions:
    top_k: int = DEFAULT_TOP_K
    threshold: Optional[float] = None


@dataclass
class RelocationOptions:
    enabled: bool = False
    cap_per_source: int = DEFAULT_CAP
    prune: bool = True
    iterations: int = 1


@dataclass
class OutputOptions:
    summary_csv: Optional[str] = None
    artifact_json: Optional[str] = None
    probe_dump: Optional[str] = None
    timings_json: Optional[str] = None


@dataclass
class RunConfig:
    box: BoxOptions
    sources: SourceOptions
    mesh: MeshOptions = field(default_factory=MeshOptions)
    layers: Optional[list[dict]] = None     # [{"thickness": cm, "conductivity": W/(cm K)}]
    hotspot: HotspotOptions = field(default_factory=HotspotOptions)
    relocation: RelocationOptions = field(default_factory=RelocationOptions)
    output: OutputOptions = field(default_factory=OutputOptions)

    def chip(self) -> Box3:
        return Box3(Point3.of(self.box.origin), tuple(self.box.dims))

    def mesh_spec(self) -> MeshSpec:
        m = self.mesh
        return MeshSpec(tuple(m.coarse_divisions), m.fine_resolution, m.fine_extent)

    def source_config(self) -> SourceConfig:
        s = self.sources
        return SourceConfig(s.count, tuple(s.strength_range), s.seed)

    def explicit_sources(self) -> Optional[list[HeatSource]]:
        if self.sources.explicit is None:
            return None
        return [HeatSource(Point3.of(e["position"]), e["strength"]) for e in self.sources.explicit]

    def layer_stack(self) -> Optional[LayerStack]:
        if self.layers is None:
            return None
        return LayerStack(tuple(Layer(l["thickness"], l["conductivity"]) for l in self.layers))

    def placement_margin(self) -> float:
        m = self.sources.margin
        return self.mesh.fine_extent if m is None else m

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))

    def validate(self) -> "RunConfig":
        _check("box", self.chip)
        _check("mesh", self.mesh_spec)
        if self.sources.explicit is not None:
            srcs = _check("sources.explicit", self.explicit_sources)
            if not srcs:
                raise ConfigError("sources.explicit", "must list at least one source")
            if self.sources.count not in (None, len(srcs)):
                raise ConfigError("sources.count", f"{self.sources.count} disagrees with {len(srcs)} explicit sources")
            self.sources.count = len(srcs)
            chip = self.chip()
            for i, s in enumerate(srcs):
                if not contains(chip, s.position):
                    raise ConfigError(f"sources.explicit[{i}].position", "lies outside the box")
        else:
            if self.sources.count is None:
                raise ConfigError("sources.count", "required")
            if self.sources.count < 1:
                raise ConfigError("sources.count", f"must be >= 1, got {self.sources.count}")
            rng = tuple(self.sources.strength_range)
            if len(rng) != 2 or not (0 < rng[0] <= rng[1]):
                raise ConfigError("sources.strength_range", f"must be [min, max] with 0 < min <= max, got {list(rng)}")
            _check("sources.seed", self.source_config)
            margin = self.placement_margin()
            if margin < 0:
                raise ConfigError("sources.margin", f"must be >= 0, got {margin}")
            if margin > 0:
                try:
                    self.chip().inset(margin)
                except ValueError as e:
                    raise ConfigError("sources.margin", str(e)) from None
        if self.layers is not None:
            _check("layers", self.layer_stack)
        h = self.hotspot
        if h.top_k < 0:
            raise ConfigError("hotspot.top_k", f"must be >= 0, got {h.top_k}")
        if h.threshold is not None and not h.threshold > 0:
            raise ConfigError("hotspot.threshold", f"must be > 0, got {h.threshold}")
        r = self.relocation
        if r.cap_per_source < 1:
            raise ConfigError("relocation.cap_per_source", f"must be >= 1, got {r.cap_per_source}")
        if r.iterations < 1:
            raise ConfigError("relocation.iterations", f"must be >= 1, got {r.iterations}")
        return self


def _check(name: str, build):
    try:
        return build()
    except (ValueError, TypeError, KeyError) as e:
        raise ConfigError(name, str(e)) from None


def _jsonable(x: Any) -> Any:
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


_SECTIONS = {
    "box": BoxOptions, "sources": SourceOptions, "mesh": MeshOptions,
    "hotspot": HotspotOptions, "relocation": RelocationOptions, "output": OutputOptions,
}


def _section(name: str, cls, data: Any):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(name, "must be an object")
    known = cls.__dataclass_fields__
    for k in data:
        if k not in known:
            raise ConfigError(f"{name}.{k}", "unknown field")
    try:
        return cls(**data)
    except TypeError:
        missing = [k for k, f in known.items() if k not in data
                   and f.default is MISSING and f.default_factory is MISSING]
        raise ConfigError(f"{name}.{missing[0] if missing else '?'}", "required") from None


def _merge(base: dict, overrides: dict) -> dict:
    out = copy.deepcopy(base)
    for dotted, value in overrides.items():
        if value is None:
            continue
        node = out
        *parents, leaf = dotted.split(".")
        for p in parents:
            if node.get(p) is None:
                node[p] = {}
            node = node[p]
        node[leaf] = value
    return out


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    for k in data:
        if k not in RunConfig.__dataclass_fields__:
            raise ConfigError(k, "unknown field")
    if "box" not in data or not (data["box"] or {}).get("dims"):
        raise ConfigError("box.dims", "required")
    sections = {name: _section(name, cls, data.get(name)) for name, cls in _SECTIONS.items()}
    return RunConfig(layers=data.get("layers"), **sections).validate()


def parse_config(path: Optional[str | Path] = None, overrides: Optional[dict] = None) -> RunConfig:
    """Load a JSON config (optional), apply dotted-key ``overrides`` on top and validate."""
    data: dict = {}
    if path is not None:
        text = Path(path).read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(str(path), f"invalid JSON: {e}") from None
    return config_from_dict(_merge(data, overrides or {}))
