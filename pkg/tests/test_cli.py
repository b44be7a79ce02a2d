import json
import subprocess
import sys

import pytest

from tgm.cli import run
from tgm.formats import (FormatError, divisor_from_json, divisor_to_json, dumps, format_divisor,
                         parse_divisor)
from tgm.segdiv import scale

from _support import minus_e, cusp_divisor

SAMPLE_TEXT = """\
model blowup d=1
divisor D1 ray 1 0
divisor E  ray 1 1
divisor D2 ray 0 1
divisor C  curve v+(u+v^2)^3
seg D1 -1/3 -1/3
seg D2 1/2 1/2
seg E 0 1/6
"""


@pytest.fixture
def cusp_file(tmp_path):
    path = tmp_path / "cusp.div"
    path.write_text(format_divisor(cusp_divisor()))
    return str(path)


def test_text_format_parses_documented_example():
    d = parse_divisor(SAMPLE_TEXT)
    assert str(d) == "{-1/3}*D1 + [0,1/6]*E + {1/2}*D2"
    assert d.model.curve_divisors["C"].total_degree() == 6
    assert parse_divisor(format_divisor(d)) == d


@pytest.mark.parametrize("text", [
    "divisor D1 ray 1 0\n",
    "model blowup d=1\nseg X 0 1\n",
    "model blowup d=1\nseg E 1 0\n",
    "model blowup d=1\nseg E 1/0 1\n",
    "model blowup d=1\nfoo\n",
    "model blowup d=1\ndivisor D1 ray 2 0\n",
    "model fan\ndivisor A ray 1 0\ndivisor B ray 2 0\n",
    "model blowup d=1\ndivisor C curve u+w\n",
])
def test_text_format_errors(text):
    with pytest.raises(FormatError):
        parse_divisor(text)


def test_json_round_trip_is_byte_identical():
    for d in (cusp_divisor(), minus_e(), parse_divisor(SAMPLE_TEXT)):
        doc = dumps(divisor_to_json(d))
        assert dumps(divisor_to_json(divisor_from_json(json.loads(doc)))) == doc


def test_cli_json_divisor_round_trip(cusp_file, tmp_path):
    code, out, _ = run(["--json", "scale", "--divisor", cusp_file, "-m", "6"])
    assert code == 0
    saved = tmp_path / "six.json"
    saved.write_text(out)
    code, again, _ = run(["--json", "scale", "--divisor", str(saved), "-m", "1"])
    assert json.loads(again)["divisor"] == json.loads(out)["divisor"]
    assert dumps(json.loads(out)["divisor"]) == dumps(divisor_to_json(scale(cusp_divisor(), 6)))


def test_cli_examples(cusp_file, tmp_path):
    code, out, _ = run(["eval", "--divisor", cusp_file, "-n", "0"])
    assert (code, out.strip()) == (0, "0")
    six, mine = tmp_path / "sixD.div", tmp_path / "minusE.div"
    six.write_text(format_divisor(scale(cusp_divisor(), 6)))
    mine.write_text(format_divisor(minus_e()))
    code, out, _ = run(["equiv", str(six), str(mine)])
    assert code == 0 and "[2,-3]" in out
    code, out, _ = run(["--json", "equiv", cusp_file, str(mine)])
    assert code == 1 and json.loads(out)["witness"] is None


def test_cli_negative_weight_lists():
    code, out, _ = run(["--json", "downgrade", "--weights", "-1,1,1", "--section", "0,1,0"])
    assert code == 0 and json.loads(out)["section"] == [0, 1, 0]
    code, out, _ = run(["prop-formula", "--weights", "-6,2,3", "--section", "0,-1,1"])
    assert out.strip() == "{-1/3}*D2 + [0,1/6]*E + {1/2}*D3"


@pytest.mark.parametrize("argv, code", [
    ([], 2),
    (["frobnicate"], 2),
    (["downgrade"], 2),
    (["downgrade", "--weights", "1,x,3"], 2),
    (["downgrade", "--weights", "1,2"], 2),
    (["downgrade", "--weights", "1,1,1"], 1),
    (["downgrade", "--weights", "2,4,-6"], 1),
    (["eval", "--divisor", "/nonexistent.div", "-n", "1"], 2),
    (["hypmod", "--poly", "u+1", "--vars", "u"], 1),
    (["hypmod", "--poly", "u+(", "--vars", "u"], 2),
    (["build", "--f", "u", "--g", "v", "--zeta", "0", "--xi", "1"], 2),
    (["intersect", "--f", "u", "--g", "v^2"], 1),
    (["intersect", "--f", "u*v", "--g", "u"], 1),
    (["crosscheck", "--weights", "-1,1,2"], 1),
])
def test_cli_exit_codes(argv, code):
    assert run(argv)[0] == code


def test_cli_error_json_document():
    code, out, err = run(["--json", "downgrade", "--weights", "1,1,1"])
    assert code == 1 and json.loads(out) == {"error": "action not hyperbolic"}
    assert "action not hyperbolic" in err


def test_cli_hypmod_and_build():
    code, out, _ = run(["hypmod", "--poly", "v+(u+v^2)^3", "--vars", "u,v"])
    assert code == 0 and out.strip() == "x1^5*x3^6 + 3*x1^4*x2*x3^4 + 3*x1^3*x2^2*x3^2 + x1^2*x2^3 + x3"
    code, out, _ = run(["--json", "build", "--f", "u", "--g", "v", "--zeta", "1", "--xi", "1", "--eliminate"])
    doc = json.loads(out)
    assert doc["relations"] == [] and doc["dimension"] == 3


def test_cli_sections_and_verify_env(cusp_file, monkeypatch):
    code, out, _ = run(["--json", "sections", "--divisor", cusp_file, "-n", "-6"])
    assert json.loads(out)["generators"] == [[-2, 3]]
    monkeypatch.setenv("TGM_VERIFY_BOUND", "2")
    code, out, _ = run(["--json", "find-d", "--divisor", cusp_file, "--bound", "24"])
    assert json.loads(out)["verify"] == 2
    code, out, err = run(["find-d", "--divisor", cusp_file, "--bound", "0"])
    assert code == 1 and "no generating degree" in err


def test_cli_validate(tmp_path):
    good = {"weights": [-1, 1, 1], "section": [0, 1, 0], "f": "u", "g": "v+(u+v^2)^3",
            "param_f": ["0", "t"], "param_g": ["t-t^6", "-t^3"], "mu_weights": [1, 1]}
    path = tmp_path / "data.json"
    path.write_text(json.dumps(good))
    code, out, _ = run(["--json", "validate", "--data", str(path)])
    doc = json.loads(out)
    assert code == 0 and doc["passed"] and doc["d"] == 6
    assert doc["warnings"] == ["section not strictly positive"]
    path.write_text(json.dumps({**good, "g": "u-v^2", "param_g": ["t^2", "t"]}))
    assert run(["validate", "--data", str(path)])[0] == 1
    path.write_text("{not json")
    assert run(["validate", "--data", str(path)])[0] == 2


def test_cli_smooth_check(cusp_file):
    code, out, _ = run(["--json", "smooth-check", "--divisor", cusp_file])
    assert code == 0 and json.loads(out)["match"] == [-6, 2, 3]


def test_cli_is_deterministic(cusp_file):
    argv = ["--json", "downgrade", "--weights", "6,10,-15"]
    assert run(argv) == run(argv)


def test_batch_mode(tmp_path, cusp_file):
    batch = tmp_path / "jobs.txt"
    lines = [f"describe --divisor {cusp_file}", "downgrade --weights 2,3,-6",
             "crosscheck --weights -1,1,2", f"sections --divisor {cusp_file} -n 2"]
    batch.write_text("\n".join(lines) + "\n# comment\n")
    code, out, _ = run(["--json", "--batch", str(batch)])
    docs = json.loads(out)
    assert code == 1
    assert [d["exit"] for d in docs] == [0, 0, 1, 0]
    assert docs[3]["output"]["generators"] == [[1, -1]]
    for line, doc in zip(lines, docs):
        single = run(["--json", *line.split()])
        assert json.loads(single[1]) == doc["output"]


def test_console_entry_point(cusp_file):
    proc = subprocess.run([sys.executable, "-m", "tgm", "describe", "--divisor", cusp_file],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "nontrivial isotropy orders [2, 3]" in proc.stdout
