import json
import subprocess
import sys

import pytest

from cubicnet.cli import main
from cubicnet.degeneration import TABLES, cyclic_equal


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def labels(cycle):
    short = {"saddle": "S", "tripod": "T", "twosaddles": "2S", "threesaddles": "3S"}
    return [short[c["type"]] if "type" in c else c["core_type"] for c in cycle]


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "--t", "0.5,0.3")
    assert code == 0
    assert json.loads(out)["chamber"] == "CC"


def test_scan_chamber_d(capsys):
    code, out, _ = run(capsys, "scan", "--t", "0.5,0.1")
    assert code == 0
    assert cyclic_equal(labels(json.loads(out)), TABLES["CD"])


def test_scan_figure_phases(capsys):
    code, out, _ = run(capsys, "scan", "--t", "0.5,0.5", "--alpha", "-13.89,8.23")
    cyc = json.loads(out)
    saddles = sorted(c["phase"] for c in cyc if c.get("type") == "saddle")
    tripods = [c["phase"] for c in cyc if c.get("type") == "tripod"]
    assert any(abs(p - 0.524) < 5e-3 for p in saddles)
    assert len(tripods) == 1 and min(tripods[0], 1.0471975511965976 - tripods[0]) < 5e-3
    assert all(c["class"][0] is not None for c in cyc if "type" in c)


def test_network_degree_one_json(capsys, tmp_path):
    out = tmp_path / "n.json"
    code, _, _ = run(capsys, "network", "--poly", "0,0", "--poly", "1,0", "--json", str(out))
    assert code == 0
    d = json.loads(out.read_text())
    assert d["counts"]["trajectories"] == 8 and d["counts"]["EscapedToPole"] == 8
    assert d["joints"] == []


def test_network_saddle_phase_svg(capsys, tmp_path):
    svg = tmp_path / "out.svg"
    js = tmp_path / "out.json"
    code, _, _ = run(capsys, "network", "--t", "0.5,0.5", "--alpha", "-13.89,8.23", "--theta", "0.524",
                     "--svg", str(svg), "--json", str(js))
    assert code == 0
    d = json.loads(js.read_text())
    assert abs(d["theta_frame"] - 0.5235987756) < 1e-6
    kinds = [x["kind"] for x in d["double_trajectories"]]
    assert kinds.count("SaddleCandidate") == 1
    assert d["core_type"] == "Sad1Pent"
    text = svg.read_text()
    assert text.startswith("<svg")
    assert 'class="pos double"' in text or 'class="neg double"' in text


def test_network_deterministic(capsys, tmp_path):
    outs = []
    for i in range(2):
        js, svg = tmp_path / f"{i}.json", tmp_path / f"{i}.svg"
        assert run(capsys, "network", "--t", "0.5,0.3", "--theta", "0.4", "--json", str(js),
                   "--svg", str(svg), "--frame", "mobius")[0] == 0
        outs.append((js.read_bytes(), svg.read_bytes()))
    assert outs[0] == outs[1]


def test_walls(capsys, tmp_path):
    code, out, _ = run(capsys, "walls", "--grid", "4x12", "--k", "3", "--k", "4",
                       "--cache-dir", str(tmp_path))
    assert code == 0
    d = json.loads(out)
    assert d["grid"] == [4, 12] and [w["k"] for w in d["walls"]] == [3, 4]
    assert all(0 < p[1] < 0.3 for p in d["walls"][0]["points"])
    assert any(tmp_path.iterdir())


def test_bps(capsys):
    code, out, _ = run(capsys, "bps", "--t", "0.5,0.1")
    d = json.loads(out)
    assert code == 0 and d["chamber"] == "CD" and len(d["active"]) == 12


def test_verify_wcf(capsys):
    code, out, err = run(capsys, "verify-wcf", "--t1", "0.5,0.38", "--t2", "0.5,0.43", "--sector", "0.1,0.6",
                         "--alpha", "-13.89,8.23")
    assert code == 0 and "PASS" in err
    rep = json.loads(out)
    assert rep["equal"] and rep["per_generator"]["x1"]["left"] == "x1**2/(x2*x3**2*x4) + x1"


def test_config_overrides_flags(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"differential": {"poly": [[-1, 0], [0, 0], [1, 0]]}, "theta": 0.3,
                               "tolerances": {"hit_tol": 1e-8}}))
    code, out, _ = run(capsys, "network", "--poly", "0,0", "--poly", "1,0", "--config", str(cfg), "--no-core")
    assert code == 0
    d = json.loads(out)
    assert d["counts"]["trajectories"] == 18 and d["theta"] == 0.3


@pytest.mark.parametrize("argv", [
    ["classify"],
    ["classify", "--t", "abc"],
    ["network", "--t", "0.5,0.3", "--tol", "nonsense=1"],
    ["network", "--t", "0.5,0.3", "--tol", "hit_tol=-1"],
    ["network", "--t", "0.5,0.3", "--max-generation", "0"],
    ["walls", "--grid", "4by4"],
    ["verify-wcf", "--t1", "0.5,0.3"],
    ["frobnicate"],
])
def test_config_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_unknown_config_key(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"colour": "red"}))
    assert run(capsys, "classify", "--t", "0.5,0.3", "--config", str(cfg))[0] == 2


def test_engine_error_exit_1(capsys):
    code, _, err = run(capsys, "network", "--poly", "4,0", "--poly", "-4,0", "--poly", "1,0")
    assert code == 1 and "MultipleZero" in err


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "cubicnet", "classify", "--t", "0.25,0"],
                       capture_output=True, text=True, timeout=120)
    assert r.returncode == 0
    assert json.loads(r.stdout)["chamber"] == "Delta4"
