#!/usr/bin/env python
"""Time field evaluation at full scale (50 sources, default meshes, ~2.3M probes).

    THERMAGRID_THREADS=4 python scripts/bench_field.py
"""
import time

from thermagrid import Box3, MeshSpec, SourceConfig, assemble_probes, compute_field, generate_sources
from thermagrid.thermal_model import thread_count


def main(n_sources: int = 50) -> None:
    box = Box3.from_dims(20, 10, 10)
    srcs = generate_sources(SourceConfig(n_sources, (1.0, 1.0), 0), box.inset(1.0))
    t0 = time.perf_counter()
    probes = assemble_probes(srcs, MeshSpec(), box)
    t1 = time.perf_counter()
    compute_field(probes, srcs)
    t2 = time.perf_counter()
    print(f"{len(probes)} probes, {n_sources} sources, {thread_count()} threads: "
          f"mesh {t1 - t0:.2f}s, field {t2 - t1:.2f}s")


if __name__ == "__main__":
    main()
