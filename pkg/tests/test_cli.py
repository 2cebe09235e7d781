import json

from twistfact import cli

from conftest import DATA


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_factor_with_embedding(capsys):
    code, out, _ = run(capsys, "factor", "7056.bg1", "mod11_order5", "--embedding", "2")
    assert code == 0
    rep = json.loads(out)
    assert rep["ideal_part_text"] == "(11, z - 4)^1 * (11, z - 3)^1"
    assert rep["norm_plus"] in (341, -341)


def test_lvalue_with_file_paths(capsys, tmp_path):
    out_file = tmp_path / "r.json"
    code, out, _ = run(capsys, "lvalue", str(DATA / "curves" / "c291.json"),
                       str(DATA / "chars" / "mod31_order5.json"), "--prec", "128", "--out", str(out_file))
    assert code == 0
    assert json.loads(out_file.read_text()) == json.loads(out)
    assert json.loads(out)["precision"] >= 128


def test_inline_character(capsys):
    code, out, _ = run(capsys, "lvalue", "6400.a1", '{"modulus": 11, "order": 5, "pins": [[2, 2]]}')
    assert code == 0 and json.loads(out)["norm_plus"] in (11, -11)


def test_visualize(capsys):
    code, out, _ = run(capsys, "visualize", str(DATA / "mw" / "9450_dr1.json"),
                       "--char", "mod11_order5", "--curve", "9450.du1")
    rep = json.loads(out)
    assert code == 0
    assert rep["action_matrix"]["eigenvalues_mod_p"] == {"3": 1, "4": 1, "5": 1, "9": 1}
    assert rep["corollary"]["matches_scriptL"]


def test_descent(capsys):
    code, out, _ = run(capsys, "descent", str(DATA / "descent" / "6400_a1.json"))
    rep = json.loads(out)
    assert code == 0 and rep["h_theta_candidates"] == [["x - 5", "x - 9"]]


def test_bsd_check(capsys):
    code, out, _ = run(capsys, "bsd-check", "7056.bg1", "mod11_order5")
    assert code == 0 and json.loads(out)["status"] == "pass"


def test_verify_and_exit_codes(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"character": {"modulus": 11, "order": 5, "pins": [[2, 2]]},
                               "entries": [{"curve": "7056.bg1", "source": "table", "h_theta_roots": [3, 4, 5, 9]}]}))
    code, out, _ = run(capsys, "verify", str(cfg))
    rep = json.loads(out)
    assert code == 0 and rep["all_hold"] is False   # a failed conjecture is content, not an error
    code, _, err = run(capsys, "verify", str(tmp_path / "missing.json"))
    assert code == 1 and json.loads(err)["error"] == "SchemaError"
    code, _, err = run(capsys, "lvalue", "7056.bg1", "no_such_char")
    assert code == 1
