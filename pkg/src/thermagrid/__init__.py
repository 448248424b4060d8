"""Unit-sphere thermal model for 3D ICs: hotspot detection and min-cost source relocation."""
from .geometry import Box3, Point3, contains, euclidean_distance, manhattan_distance
from .thermal_model import (HeatSource, Layer, LayerStack, cap_solid_angle, contribution,
                            cumulative_power, effective_conductivity, temperature)
from .meshing import (MeshClass, MeshSpec, ProbePoint, ProbeSet, SourceConfig, assemble_probes,
                      coarse_grid, fine_grid, generate_sources)
from .hotspot import (ExcessField, HotspotReport, SummaryTable, ThermalField, compute_excess,
                      compute_field, compute_threshold, detect_hotspots, summarize)
from .relocation import (CandidateSet, CostMatrix, InfeasibleMatching, RelocationPlan,
                         apply_relocation, build_cost_matrix, eligible_targets, evaluate_plan,
                         min_weight_matching, prune_candidates)
from .config import ConfigError, RunConfig, parse_config
from .pipeline import RunArtifact, run_simulation, run_sweep

__version__ = "0.1.0"
