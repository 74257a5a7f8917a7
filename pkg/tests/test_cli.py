import json
import math
import subprocess
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

from idemconv.cli import canonical, dumps, main

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return p


def test_canonical_formatting():
    assert canonical(1 / 3) == 0.333333333333
    assert canonical(-math.inf) == "-inf" and canonical(math.nan) is None
    assert canonical({"b": (1.0, 2)}) == {"b": [1.0, 2]}
    assert dumps({"x": -0.0}) == '{\n  "x": 0.0\n}\n'


def test_hull(capsys, tmp_path):
    code, out = run(capsys, "hull", "--polytope", SAMPLES / "id_polytope.json",
                    "--queries", SAMPLES / "queries.json")
    assert code == 0
    first = out["results"][0]
    assert first["member"] and first["weights"] == [-1.0, 0.0]
    assert out["results"][1]["member"]  # a generator
    svg = tmp_path / "hull.svg"
    code, out = run(capsys, "hull", "--polytope", SAMPLES / "box_polytope.json",
                    "--queries", SAMPLES / "box_queries.json", "--svg", svg)
    assert code == 0 and [r["member"] for r in out["results"]] == [True, True, False]
    assert ET.parse(svg).getroot().tag.endswith("svg")


def test_hull_errors(capsys, tmp_path):
    bad = write(tmp_path, "p.json", {"flavor": "max-times", "generators": [[1.0, "-inf"]]})
    assert run(capsys, "hull", "--polytope", bad, "--queries", SAMPLES / "queries.json")[0] == 2
    q3 = write(tmp_path, "q.json", {"queries": [[0.0, 0.0, 0.0]]})
    assert run(capsys, "hull", "--polytope", SAMPLES / "id_polytope.json", "--queries", q3)[0] == 3
    assert run(capsys, "hull", "--polytope", tmp_path / "missing.json", "--queries", q3)[0] == 2
    garbage = tmp_path / "g.json"
    garbage.write_text("{not json")
    assert run(capsys, "hull", "--polytope", garbage, "--queries", q3)[0] == 2


def test_bary(capsys, tmp_path):
    assert run(capsys, "bary", "--measure", SAMPLES / "two_atom_mp.json") == (
        0, {"model": "max-plus", "barycenter": [0.0, -1.0]})
    assert run(capsys, "bary", "--measure", SAMPLES / "dirac_mt.json")[1]["barycenter"] == [0.4, 1.0]
    assert run(capsys, "bary", "--measure", SAMPLES / "unnormalized_mt.json")[0] == 4


def test_iso_and_transport(capsys, tmp_path):
    code, out = run(capsys, "iso", "--measure", SAMPLES / "weights_mt.json", "--direction", "gx",
                    "--round-trip")
    assert code == 0 and out["round_trip"]
    assert out["result"]["weights"] == {"a": 0.0, "b": float(f"{math.log(0.5):.12g}"), "c": "-inf"}
    mp = write(tmp_path, "mp.json", out["result"])
    code, back = run(capsys, "iso", "--measure", mp, "--direction", "gx-inv", "--round-trip")
    assert code == 0 and back["result"]["weights"]["c"] == 0.0
    assert run(capsys, "iso", "--measure", mp, "--direction", "gx")[0] == 2
    code, t = run(capsys, "transport", "--measure", SAMPLES / "points_mt.json")
    code2, t2 = run(capsys, "iso", "--measure", SAMPLES / "points_mt.json", "--direction", "lh",
                    "--embedding-depth", 3)
    assert code == code2 == 0 and t == t2
    assert t["result"]["model"] == "max-plus"


def test_probe_fixtures(capsys, tmp_path):
    cfg = write(tmp_path, "cfg.json", {"point_samples": 3, "target_samples": 24})
    svg = tmp_path / "w.svg"
    code, out = run(capsys, "probe", "--fixture", "vee-on-ID", "--config", cfg, "--svg", svg)
    assert code == 10
    certs = [p["certification"] for p in out["points"] if p["kind"] == "witness"]
    assert certs and certs[0]["status"] == "certified"
    assert svg.exists()
    code, out = run(capsys, "probe", "--fixture", "s-on-[0.25,1]^2", "--config", cfg)
    assert code == 0 and out["summary"]["witness"] == 0
    code, out = run(capsys, "probe", "--fixture", "s-on-AD-x-AD", "--config", cfg)
    assert code == 10


def test_probe_map_file_and_errors(capsys, tmp_path):
    cfg = write(tmp_path, "cfg.json", {"point_samples": 0})
    code, out = run(capsys, "probe", "--map", SAMPLES / "vee_map.json", "--config", cfg,
                    "--pin", SAMPLES / "vee_pin.json")
    assert code == 10 and out["summary"]["witness"] >= 1
    pin = write(tmp_path, "pin.json", {"pins": [[0.0, -1.0]]})
    assert run(capsys, "probe", "--map", SAMPLES / "vee_map.json", "--config", cfg, "--pin", pin)[0] == 3
    bad = write(tmp_path, "bad.json", {"flavor": "max-plus"})
    assert run(capsys, "probe", "--map", bad)[0] == 2
    assert run(capsys, "probe", "--fixture", "no-such-map")[0] == 2
    badcfg = write(tmp_path, "badcfg.json", {"epsilon": -1})
    assert run(capsys, "probe", "--fixture", "vee-on-ID", "--config", badcfg)[0] == 2


def test_check(capsys):
    code, out = run(capsys, "check", "--suite", "prop-af", "--trials", 100)
    assert code == 0 and out["passed"]
    assert all(r["max_discrepancy"] == 0.0 for r in out["reports"])
    code, out = run(capsys, "check", "--suite", "hombar", "--trials", 100, "--seed", 3)
    assert code == 0 and max(r["max_discrepancy"] for r in out["reports"]) <= 1e-9
    assert main(["check", "--suite", "bogus"]) == 2


def test_outputs_are_byte_identical(tmp_path):
    paths = []
    for i in range(2):
        p = tmp_path / f"out{i}.json"
        assert main(["check", "--suite", "transport", "--trials", "50", "--seed", "7", "-o", str(p)]) == 0
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()
    cfg = write(tmp_path, "cfg.json", {"point_samples": 2, "target_samples": 16})
    outs = []
    for i in range(2):
        p = tmp_path / f"probe{i}.json"
        main(["probe", "--fixture", "s-on-AD", "--config", str(cfg), "-o", str(p)])
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "idemconv", "bary", "--measure",
                           str(SAMPLES / "two_atom_mp.json")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["barycenter"] == [0.0, -1.0]
    proc = subprocess.run([sys.executable, "-m", "idemconv", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "0.1.0" in proc.stdout
