"""Command line: ``thermagrid {simulate,sweep,relocate,report}``.

Exit codes: 0 ok, 1 validation error, 2 infeasible matching, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import ConfigError, parse_config
from .hotspot import SUMMARY_HEADER, summarize
from .pipeline import RunArtifact, _write, run_simulation, run_sweep
from .relocation import InfeasibleMatching

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_IO = 0, 1, 2, 3


def _run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON config file; flags override it")
    g = p.add_argument_group("chip and sources")
    g.add_argument("--box", nargs=3, type=float, metavar=("LX", "LY", "LZ"))
    g.add_argument("--box-origin", nargs=3, type=float, metavar=("X", "Y", "Z"))
    g.add_argument("--sources", type=int, dest="count")
    g.add_argument("--strength-range", nargs=2, type=float, metavar=("QMIN", "QMAX"))
    g.add_argument("--seed", type=int)
    g.add_argument("--margin", type=float, help="inset of the source placement region")
    g = p.add_argument_group("mesh")
    g.add_argument("--coarse-divisions", nargs=3, type=int, metavar=("NX", "NY", "NZ"))
    g.add_argument("--fine-resolution", type=int)
    g.add_argument("--fine-extent", type=float)
    g = p.add_argument_group("hotspots")
    g.add_argument("--top-k", type=int)
    g.add_argument("--threshold", type=float, help="override the source-derived threshold")
    g = p.add_argument_group("relocation")
    g.add_argument("--relocate", action=argparse.BooleanOptionalAction, default=None)
    g.add_argument("--cap-per-source", type=int)
    g.add_argument("--prune", action=argparse.BooleanOptionalAction, default=None)
    g.add_argument("--iterations", type=int)
    g = p.add_argument_group("output")
    g.add_argument("--summary-csv")
    g.add_argument("--artifact-json")
    g.add_argument("--probe-dump")
    g.add_argument("--timings-json")


_FLAG_KEYS = {
    "box": "box.dims", "box_origin": "box.origin", "count": "sources.count",
    "strength_range": "sources.strength_range", "seed": "sources.seed", "margin": "sources.margin",
    "coarse_divisions": "mesh.coarse_divisions", "fine_resolution": "mesh.fine_resolution",
    "fine_extent": "mesh.fine_extent", "top_k": "hotspot.top_k", "threshold": "hotspot.threshold",
    "relocate": "relocation.enabled", "cap_per_source": "relocation.cap_per_source",
    "prune": "relocation.prune", "iterations": "relocation.iterations",
    "summary_csv": "output.summary_csv", "artifact_json": "output.artifact_json",
    "probe_dump": "output.probe_dump", "timings_json": "output.timings_json",
}


def overrides_from_args(args: argparse.Namespace) -> dict:
    return {dotted: getattr(args, attr) for attr, dotted in _FLAG_KEYS.items()
            if getattr(args, attr, None) is not None}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true")
    parser = argparse.ArgumentParser(prog="thermagrid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="evaluate the field and detect hotspots")
    _run_flags(p)
    p = sub.add_parser("relocate", parents=[common], help="simulate, then move sources onto cool targets")
    _run_flags(p)
    p = sub.add_parser("sweep", parents=[common], help="one run per source count, Table-1-style CSV")
    _run_flags(p)
    p.add_argument("--counts", nargs="+", type=int, default=[5, 10, 20, 40, 50])
    p = sub.add_parser("report", parents=[common], help="summarise saved artifact JSON files")
    p.add_argument("artifacts", nargs="+", type=Path)
    p.add_argument("--summary-csv")
    return parser


def _print_summary(table) -> None:
    print("  ".join(f"{h:>12}" for h in SUMMARY_HEADER))
    for r in table.rows:
        cells = []
        for h in SUMMARY_HEADER:
            v = r[h]
            if h.endswith("_pct"):
                cells.append(f"{100 * v:11.2f}%")
            elif isinstance(v, float):
                cells.append(f"{v:12.6g}")
            else:
                cells.append(f"{v:12d}")
        print("  ".join(cells))


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "report":
        arts = [RunArtifact.from_json(p.read_text()) for p in args.artifacts]
        table = summarize([a.hotspot_report() for a in arts])
        _print_summary(table)
        if args.summary_csv:
            _write(args.summary_csv, table.to_csv())
        for p, a in zip(args.artifacts, arts):
            if a.relocation:
                m = a.relocation["metrics"]
                print(f"{p}: moved {len(a.relocation['moves'])} sources, total cost "
                      f"{a.relocation['total_cost']:.6g}, max power {m['before']['max_power']:.6g} -> "
                      f"{m['after']['max_power']:.6g}")
        return EXIT_OK

    overrides = overrides_from_args(args)
    if args.command == "relocate":
        overrides["relocation.enabled"] = True
    if args.command == "sweep":
        # the count is set per row; any value passes validation
        overrides.setdefault("sources.count", args.counts[0])
    cfg = parse_config(args.config, overrides)
    if args.command == "sweep":
        table = run_sweep(cfg, args.counts)
        _print_summary(table)
        return EXIT_OK
    artifact = run_simulation(cfg)
    _print_summary(summarize([artifact.hotspot_report()]))
    if artifact.relocation:
        r = artifact.relocation
        m = r["metrics"]
        print(f"relocation: total Manhattan cost {r['total_cost']:.6g}; "
              f"max power {m['before']['max_power']:.6g} -> {m['after']['max_power']:.6g}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _dispatch(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleMatching as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (OSError, json.JSONDecodeError) as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
