import csv
import json

import pytest

from thermagrid.cli import main
from thermagrid.config import ConfigError, config_from_dict, parse_config
from thermagrid.hotspot import SUMMARY_HEADER
from thermagrid.pipeline import RunArtifact, execute, run_simulation, run_sweep

SMALL = {"coarse_divisions": [10, 5, 5], "fine_resolution": 4, "fine_extent": 0.5}

PAIR = {
    "box": {"dims": [5, 5, 5]},
    "sources": {"explicit": [{"position": [2, 2, 2], "strength": 1.0},
                             {"position": [3, 2, 2], "strength": 1.0}]},
    "mesh": {"coarse_divisions": [5, 5, 5], "fine_resolution": 3, "fine_extent": 0.75},
}


def small_cfg(tmp_path, **extra):
    d = {"box": {"dims": [10, 5, 5]}, "sources": {"count": 4, "strength_range": [0.5, 1.5], "seed": 3},
         "mesh": SMALL}
    d.update(extra)
    return d


def write(tmp_path, d, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(d))
    return p


def test_defaults_filled():
    cfg = parse_config(overrides={"box.dims": [20, 10, 10], "sources.count": 5})
    assert cfg.mesh.fine_resolution == 18
    assert tuple(cfg.mesh.coarse_divisions) == (200, 100, 100)
    assert cfg.mesh.fine_extent == 1.0
    assert cfg.hotspot.top_k == 20
    assert cfg.relocation.cap_per_source == 64 and cfg.relocation.iterations == 1


@pytest.mark.parametrize("data, field", [
    ({}, "box.dims"),
    ({"box": {"dims": [1, 1, 1]}}, "sources.count"),
    ({"box": {"dims": [4, 4, 4]}, "sources": {"count": 2, "strength_range": [-1, 1]}}, "sources.strength_range"),
    ({"box": {"dims": [4, 4, 4]}, "sources": {"count": 0}}, "sources.count"),
    ({"box": {"dims": [4, 4, 4]}, "sources": {"count": 2}, "mesh": {"fine_resolution": 0}}, "mesh"),
    ({"box": {"dims": [4, 4, 4]}, "sources": {"count": 2}, "hotspot": {"threshold": -1}}, "hotspot.threshold"),
    ({"box": {"dims": [4, 4, 4]}, "sources": {"count": 2}, "bogus": 1}, "bogus"),
    ({"box": {"dims": [4, 4, 4]}, "sources": {"count": 2, "colour": 1}}, "sources.colour"),
    ({"box": {"dims": [1, 1, 1]}, "sources": {"count": 2}}, "sources.margin"),
    ({"box": {"dims": [4, 4, 4]}, "sources": {"explicit": [{"position": [9, 0, 0], "strength": 1}]}},
     "sources.explicit[0].position"),
    ({"box": {"dims": [4, 4, 4]}, "sources": {"explicit": [{"position": [1, 1, 1], "strength": -2}]}},
     "sources.explicit"),
    ({"box": {"dims": [4, 4, 4]}, "sources": {"count": 2}, "layers": [{"thickness": 0, "conductivity": 1}]}, "layers"),
])
def test_validation_names_field(data, field):
    with pytest.raises(ConfigError) as e:
        config_from_dict(data)
    assert e.value.field == field


def test_flags_override_file(tmp_path):
    p = write(tmp_path, small_cfg(tmp_path))
    cfg = parse_config(p, {"sources.count": 50, "sources.seed": 7})
    assert cfg.sources.count == 50 and cfg.sources.seed == 7
    assert cfg.sources.strength_range == [0.5, 1.5]


def test_config_echo_reproduces_run(tmp_path):
    a, _ = execute(config_from_dict(small_cfg(tmp_path)))
    b, _ = execute(config_from_dict(a.config))
    assert a == b


def test_pair_construction_through_pipeline():
    art, state = execute(config_from_dict(PAIR))
    assert art.report["threshold"] == 1.25
    assert art.report["hottest"][0]["power"] == 2.0
    assert art.report["hottest"][0]["position"] == [2.5, 2.0, 2.0]
    assert art.report["hottest"][0]["mesh_class"] == "FINE"
    assert art.report["fm_hotspots"] >= 2
    assert art.relocation is None


def test_pair_with_default_fine_mesh():
    d = json.loads(json.dumps(PAIR))
    d["mesh"] = {"coarse_divisions": [5, 5, 5]}
    d["box"]["dims"] = [6, 5, 5]
    art, state = execute(config_from_dict(d))
    assert art.report["threshold"] == 1.25
    assert art.report["fm_probes"] == 2 * 18 ** 3
    # even lattice: nearest probes sit 1/18 off the axis, still inside both
    # sources' near zone and far above either source's own reading
    top = art.report["hottest"][0]
    assert top["mesh_class"] == "FINE"
    assert top["power"] > 1.9 > art.report["threshold"]


def test_relocation_section_and_iterations():
    d = json.loads(json.dumps(PAIR))
    d["relocation"] = {"enabled": True, "iterations": 2}
    art, state = execute(config_from_dict(d))
    r = art.relocation
    assert len(r["moves"]) == 2 and len(r["steps"]) == 2
    assert r["total_cost"] == pytest.approx(sum(m["manhattan_cost"] for m in r["moves"]))
    assert state.final_sources[0].strength == 1.0
    assert r["metrics"]["threshold"] == 1.25


def test_threshold_override_and_layers():
    d = json.loads(json.dumps(PAIR))
    d["hotspot"] = {"threshold": 1.9}
    d["layers"] = [{"thickness": 1.0, "conductivity": 0.72}]
    art, _ = execute(config_from_dict(d))
    assert art.report["threshold"] == 1.9
    assert art.thermal["wk_eff"] == 0.72
    assert art.thermal["threshold_temperature"] == pytest.approx(1.9 / 0.72)
    assert art.report["hottest"][0]["temperature"] == pytest.approx(2.0 / 0.72)


def test_reports_written_and_deterministic(tmp_path):
    outs = []
    for k in range(2):
        d = small_cfg(tmp_path, output={"summary_csv": str(tmp_path / "s.csv"),
                                        "artifact_json": str(tmp_path / "a.json"),
                                        "timings_json": str(tmp_path / "t0.json")})
        d["relocation"] = {"enabled": True}
        art = run_simulation(config_from_dict(d))
        outs.append(((tmp_path / "s.csv").read_bytes(), (tmp_path / "a.json").read_bytes()))
    assert outs[0] == outs[1]
    header = outs[0][0].decode().splitlines()[0]
    assert header == ",".join(SUMMARY_HEADER)
    back = RunArtifact.from_json((tmp_path / "a.json").read_text())
    assert back == art
    assert "field" in json.loads((tmp_path / "t0.json").read_text())


def test_probe_dump(tmp_path):
    d = small_cfg(tmp_path, output={"probe_dump": str(tmp_path / "p.csv")}, layers=[{"thickness": 0.1, "conductivity": 0.72}])
    art, state = execute(config_from_dict(d))
    from thermagrid.pipeline import emit_reports
    emit_reports(art, config_from_dict(d), state)
    rows = list(csv.reader((tmp_path / "p.csv").open()))
    assert rows[0] == ["x", "y", "z", "mesh_class", "power", "excess", "temperature"]
    assert len(rows) - 1 == art.report["total_probes"] + art.report["n_sources"]
    first = rows[1]
    assert first[3] == "SOURCE"
    assert float(first[5]) == pytest.approx(art.report["threshold"] - float(first[4]))


def test_sweep_rows(tmp_path):
    cfg = config_from_dict(small_cfg(tmp_path))
    t = run_sweep(cfg, [1])
    assert len(t) == 1 and t.rows[0]["n_sources"] == 1
    t = run_sweep(cfg, [6, 2, 4])
    assert [r["n_sources"] for r in t.rows] == [2, 4, 6]
    assert [r["fm_probes"] for r in t.rows] == [2 * 64, 4 * 64, 6 * 64]
    with pytest.raises(ValueError):
        run_sweep(cfg, [])


def test_cli_simulate_and_report(tmp_path, capsys):
    p = write(tmp_path, small_cfg(tmp_path))
    a = tmp_path / "out" / "a.json"
    rc = main(["relocate", "--config", str(p), "--artifact-json", str(a), "--summary-csv", str(tmp_path / "s.csv")])
    assert rc == 0 and a.exists()
    rc = main(["report", str(a), "--summary-csv", str(tmp_path / "r.csv")])
    assert rc == 0
    assert (tmp_path / "r.csv").read_text() == (tmp_path / "s.csv").read_text()
    assert "moved 4 sources" in capsys.readouterr().out


def test_cli_sweep(tmp_path):
    p = write(tmp_path, small_cfg(tmp_path))
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--config", str(p), "--counts", "2", "3", "--summary-csv", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 3


def test_cli_exit_codes(tmp_path):
    assert main(["simulate", "--box", "4", "4", "4"]) == 1
    assert main(["simulate", "--config", str(tmp_path / "missing.json")]) == 3
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["simulate", "--config", str(bad)]) == 1
    # one cool probe for two sources: no matching covers both
    d = json.loads(json.dumps(PAIR))
    d["mesh"] = {"coarse_divisions": [1, 1, 1], "fine_resolution": 1, "fine_extent": 0.1}
    p = write(tmp_path, d, "infeasible.json")
    assert main(["relocate", "--config", str(p)]) == 2
    blocked = tmp_path / "file"
    blocked.write_text("")
    assert main(["simulate", "--config", str(write(tmp_path, PAIR, "pair.json")),
                 "--artifact-json", str(blocked / "a.json")]) == 3
