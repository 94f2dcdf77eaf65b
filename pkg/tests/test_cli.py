import json

import pytest

from tucongestion.cli import main

VC = {"players": 2, "resources": 2, "delays": [[1, 3], [1, 3]],
      "strategy": {"kind": "vertex_cover", "nodes": ["u", "v"], "edges": [["u", "v"]],
                   "players": [{}, {}]}}


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def _strip(text):
    doc = json.loads(text)
    doc.pop("timing_ms", None)
    return doc


@pytest.fixture
def vc_file(tmp_path):
    return _write(tmp_path, "single_edge_vc.json", VC)


def test_solve_nash_report(capsys, vc_file):
    code, out, _ = _run(capsys, ["solve-nash", vc_file])
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["potential"] == 2
    assert doc["verification"]["nash"] is True
    assert "timing_ms" in doc


def test_quiet_and_determinism(capsys, vc_file):
    assert _run(capsys, ["--quiet", "solve-nash", vc_file])[1] == "2\n"
    assert _run(capsys, ["solve-social", vc_file, "--quiet"])[1] == "2\n"
    a = _run(capsys, ["solve-nash", vc_file])[1]
    b = _run(capsys, ["solve-nash", vc_file])[1]
    assert _strip(a) == _strip(b)


def test_verify_witness(capsys, tmp_path, vc_file):
    bad = _write(tmp_path, "s.json", {"strategies": [[1, 0], [1, 0]]})
    code, out, _ = _run(capsys, ["verify", "--state", bad, vc_file])
    doc = json.loads(out)
    assert code == 0 and doc["verification"]["nash"] is False
    assert doc["verification"]["witness"] == {"player": 1, "better_strategy": [0, 1]}
    good = _write(tmp_path, "g.json", {"strategies": [[1, 0], [0, 1]]})
    assert _run(capsys, ["--quiet", "verify", "--state", good, vc_file])[1] == "yes\n"


def test_dynamics_and_brute(capsys, tmp_path, vc_file):
    start = _write(tmp_path, "s.json", [[1, 0], [1, 0]])
    doc = json.loads(_run(capsys, ["dynamics", vc_file, "--state", start])[1])
    assert doc["iterations"] == 1 and doc["termination"] == "nash-reached"
    doc = json.loads(_run(capsys, ["dynamics", vc_file, "--state", start, "--max-iters", "0"])[1])
    assert doc["termination"] == "iteration-cap"
    doc = json.loads(_run(capsys, ["brute", vc_file])[1])
    assert doc["min_potential"]["value"] == 2 and doc["nash_count"] == 2


def test_check_tu(capsys, tmp_path, vc_file):
    assert _run(capsys, ["--quiet", "check-tu", vc_file])[1] == "yes\n"
    odd = _write(tmp_path, "odd.json", {"players": 1, "resources": 3, "delays": [[1], [1], [1]],
                                        "strategy": {"kind": "tu", "matrix": [[1, 1, 0], [0, 1, 1], [1, 0, 1]],
                                                     "row_lo": [None] * 3, "row_hi": [1, 1, 1]}})
    doc = json.loads(_run(capsys, ["check-tu", odd])[1])
    assert doc["all_tu"] is False
    assert _run(capsys, ["solve-nash", odd, "--verify-tu"])[0] == 2


def test_cardinality_flag(capsys, tmp_path):
    doc = {"players": 1, "resources": 2, "delays": [[3], [3]],
           "strategy": {"kind": "matching", "nodes": [0, 1, 2], "edges": [[0, 1], [1, 2]], "players": [{}]}}
    path = _write(tmp_path, "m.json", doc)
    plain = json.loads(_run(capsys, ["solve-nash", path])[1])
    assert plain["result"]["strategies"] == [[0, 0]]
    shifted = json.loads(_run(capsys, ["solve-nash", path, "--cardinality", "max"])[1])
    assert sum(shifted["result"]["strategies"][0]) == 1
    assert shifted["cardinality_variant"]["sense"] == "max"


def test_gen_reduction(capsys, tmp_path):
    formula = _write(tmp_path, "formula.sat", "1 : 1 2\n2 : 2 3\n")
    out, mapping = str(tmp_path / "inst.json"), str(tmp_path / "map.json")
    code, _, _ = _run(capsys, ["gen-reduction", "--kind", "pm-nae2sat", formula, "--out", out, "--mapping", mapping])
    assert code == 0
    m = json.loads(open(mapping).read())
    assert m["variables"] == 3 and len(m["labels"]) == 3
    state = _write(tmp_path, "s.json", [row["strategy_0"] for row in m["labels"]])
    assert _run(capsys, ["verify", "--state", state, out])[0] == 0


def test_gen_random_deterministic(capsys):
    a = _strip(_run(capsys, ["gen-random", "--family", "matroid", "--seed", "7"])[1])
    b = _strip(_run(capsys, ["gen-random", "--family", "matroid", "--seed", "7"])[1])
    assert a == b


def test_exit_codes(capsys, tmp_path, vc_file):
    assert _run(capsys, ["solve-nash", str(tmp_path / "missing.json")])[0] == 2
    assert _run(capsys, ["solve-nash", _write(tmp_path, "bad.json", "{")])[0] == 2
    asym = {"resources": 2, "delays": [[1, 2], [1, 2]],
            "strategy": [{"kind": "tu", "matrix": [[1, 1]], "row_lo": [1], "row_hi": [1]},
                         {"kind": "tu", "matrix": [[1, 0]], "row_lo": [1], "row_hi": [1]}]}
    code, _, err = _run(capsys, ["solve-nash", _write(tmp_path, "asym.json", asym)])
    assert code == 2 and "dynamics" in err
    empty = {"players": 1, "resources": 1, "delays": [[1]],
             "strategy": {"kind": "tu", "matrix": [[1]], "row_lo": [2], "row_hi": [2]}}
    assert _run(capsys, ["solve-nash", _write(tmp_path, "empty.json", empty)])[0] == 3
    # i*d(i) = 0, 4, 6: differences shrink, so not weakly convex
    concave = {"players": 3, "resources": 1, "delays": [[0, 2, 2]],
               "strategy": {"kind": "tu", "matrix": [], "row_lo": [], "row_hi": []}}
    code, _, err = _run(capsys, ["solve-social", _write(tmp_path, "c.json", concave)])
    assert code == 2 and "weakly convex" in err
