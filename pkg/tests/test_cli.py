import json
import subprocess
import sys

import pytest

from neutrocalc.cli import main, run

DEFS = """
# worked examples
f(x) = { [-x^2+6*x+3, x^3-114] on (-inf,5]; [x+1, 3*x-6] on (5, inf) }
k(x) = 2^(x or x+1)
g(x) = [2,5]/(x-1)
p(x) = 3*x - x^2*I
q(x) = 5*x^2 + (3*x+1)*I
band(x) = [x, x+2]
h22(x) = table { {3}->[6,8]; {8}->[6.5,11]; {10}->[9.5,12]; {12}->[10,12.5] }
"""


@pytest.fixture(scope="module")
def defs_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "defs.ntc"
    path.write_text(DEFS)
    return str(path)


def invoke(*argv):
    code, records = run(list(argv))
    assert len(records) == 1
    return code, records[0]


def test_directional_limit_text(defs_file):
    code, rec = invoke("limit", "--defs", defs_file, "--fn", "f",
                       "--at", "5", "--side", "left")
    assert code == 0 and rec.result_text == "[8,11]"


def test_classify_text(defs_file):
    code, rec = invoke("classify", "--defs", defs_file, "--fn", "f", "--at", "5")
    assert code == 0
    assert rec.result_text == "mereo-continuous, witness [8,9]"


def test_eval_alternatives_text(defs_file):
    code, rec = invoke("eval", "--defs", defs_file, "--fn", "k", "--at", "1")
    assert code == 0 and rec.result_text == "2 or 4"


def test_mereo_and_full_limit(defs_file):
    code, rec = invoke("mereo-limit", "--defs", defs_file, "--fn", "f", "--at", "5")
    assert code == 0 and rec.result_text == "[8,9]"
    code, rec = invoke("limit", "--defs", defs_file, "--fn", "f", "--at", "5")
    assert code == 0 and rec.result_text.startswith("does not exist")


def test_infinite_limit(defs_file):
    code, rec = invoke("limit", "--defs", defs_file, "--fn", "g",
                       "--at", "1", "--side", "right")
    assert code == 0 and rec.result_text == "+inf"


def test_diff_commands(defs_file):
    code, rec = invoke("diff", "--defs", defs_file, "--fn", "band")
    assert code == 0 and rec.result_text == "[1, 1]"
    code, rec = invoke("diff-nn", "--defs", defs_file, "--fn", "p")
    assert code == 0 and rec.result_text == "3 - 2*I*x"
    code, rec = invoke("antideriv", "--defs", defs_file, "--fn", "q")
    assert code == 0 and rec.result_text.endswith("+ C")
    assert rec.result_json["constant"] == "a + b*I"


def test_diff_with_junction(defs_file):
    code, rec = invoke("diff", "--defs", defs_file, "--fn", "f",
                       "--classify-at", "5")
    assert code == 0
    assert any("at 5" in line for line in rec.diagnostics)


def test_integrate(defs_file):
    code, rec = invoke("integrate", "--defs", defs_file, "--fn", "band",
                       "--a", "0", "--b", "1")
    assert code == 0
    payload = rec.result_json
    assert payload["intervals"][0]["lo"] == pytest.approx(0.5, abs=1e-6)
    assert payload["intervals"][0]["hi"] == pytest.approx(2.5, abs=1e-6)
    assert any("interpretations" in d for d in rec.diagnostics)


def test_integrate_set(defs_file):
    code, rec = invoke("integrate-set", "--defs", defs_file, "--fn", "band",
                       "--A", "{0}", "--B", "{1}")
    assert code == 0
    got = rec.result_json["intervals"][0]
    assert got["lo"] == pytest.approx(0.5, abs=1e-6)
    assert got["hi"] == pytest.approx(2.5, abs=1e-6)


def test_ivt_commands(defs_file):
    code, rec = invoke("ivt", "--defs", defs_file, "--fn", "band",
                       "--a", "0", "--b", "4", "--k", "3")
    assert code == 0 and rec.result_json["c"] == pytest.approx(1.0, abs=1e-6)
    code, rec = invoke("ivt-cover", "--defs", defs_file, "--fn", "h22",
                       "--a", "3", "--b", "12", "--k1", "6.5", "--k2", "12")
    assert code == 0 and rec.result_json["points"] == [8.0, 10.0]
    assert rec.result_text == "{8,10}"


def test_metric_and_norm():
    code, rec = invoke("metric", "--A", "{3,4,5,7}", "--B", "{3,7}")
    assert code == 0 and rec.result_text == "0"
    code, rec = invoke("norm", "--A", "[-3,2]")
    assert code == 0 and rec.result_text == "3"


def test_parse_check(defs_file):
    code, rec = invoke("parse-check", "--defs", defs_file)
    assert code == 0 and rec.result_text.startswith("ok:")


def test_unknown_function_is_usage_error(defs_file):
    code, rec = invoke("eval", "--defs", defs_file, "--fn", "nope", "--at", "1")
    assert code == 2 and "unknown function" in rec.result_text


def test_engine_error_is_exit_one(defs_file):
    code, rec = invoke("eval", "--defs", defs_file, "--fn", "g", "--at", "1")
    assert code == 1 and "error" in rec.result_text


def test_bad_defs_file_is_usage_error(tmp_path):
    bad = tmp_path / "bad.ntc"
    bad.write_text("f(x) = [1,\n")
    code, rec = invoke("parse-check", "--defs", str(bad))
    assert code == 2


def test_json_matches_text(defs_file):
    code, rec = invoke("limit", "--defs", defs_file, "--fn", "f",
                       "--at", "5", "--side", "left")
    payload = json.loads(rec.to_json())
    assert payload["kind"] == "limit"
    assert payload["result"]["intervals"] == [
        {"lo": 8.0, "hi": 11.0, "lo_open": False, "hi_open": False}
    ]
    assert payload["diagnostics"] == []


def test_json_infinity_encoding(defs_file):
    _, rec = invoke("limit", "--defs", defs_file, "--fn", "g",
                    "--at", "1", "--side", "right")
    assert rec.result_json == {"inf": "+"}
    _, rec = invoke("limit", "--defs", defs_file, "--fn", "g",
                    "--at", "1", "--side", "left")
    assert rec.result_json == {"inf": "-"}


def test_nn_json_encoding(defs_file):
    _, rec = invoke("eval", "--defs", defs_file, "--fn", "p", "--at", "2")
    assert rec.result_json == {"branches": [{"a": 6.0, "I": {"1": -4.0}}]}


def test_byte_identical_output(defs_file, capsys):
    argv = ["classify", "--defs", defs_file, "--fn", "f", "--at", "5", "--json"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    second = capsys.readouterr().out
    assert first == second and first.strip()


def test_module_entry_point(defs_file):
    got = subprocess.run(
        [sys.executable, "-m", "neutrocalc", "eval", "--defs", defs_file,
         "--fn", "k", "--at", "1"],
        capture_output=True, text=True,
    )
    assert got.returncode == 0
    assert got.stdout.strip() == "2 or 4"
