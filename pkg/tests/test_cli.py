import json

import pytest

from demuskin import cli



def report(args, tmp_path):
    out = tmp_path / "r.json"
    code = cli.main(args + ["--out", str(out), "--quiet"])
    return code, json.loads(out.read_text())


def test_cohomology_trivial(tmp_path, capsys):
    code, rep = report(["cohomology", "--system", "trivial", "--p", "5", "--n", "2"], tmp_path)
    assert code == 0
    assert rep["result"]["pieces"]["module"]["cohomology"]["dims"] == [1, 4, 1]
    assert rep["conventions"]["commutator"] == "(x, y) = x^-1 y^-1 x y"
    assert "power_formula" in rep["conventions"]


def test_cohomology_sym3_euler(tmp_path):
    code, rep = report(["cohomology", "--system", "sym-power", "--n", "4"], tmp_path)
    assert code == 0
    piece = rep["result"]["pieces"]["module"]
    assert piece["euler_length"] == -4 * 4


def test_invalid_config_exit_2(capsys):
    assert cli.main(["cohomology", "--n", "3"]) == 2
    assert "n must be even" in capsys.readouterr().err
    assert cli.main(["mr2", "--p", "9"]) == 2
    assert cli.main(["mr2", "--levi", "1,2"]) == 2
    assert cli.main(["mr2", "--system", "g2-short", "--p", "3"]) == 2


def test_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"p": 7, "n": 2, "system": "g2-long-heisenberg", "levi": [1, 2, 3, 4]}))
    code, rep = report(["gram", "--config", str(cfg)], tmp_path)
    assert code == 0
    assert rep["config"]["p"] == 7 and rep["result"]["levi"]["l"] == [1, 2, 3, 4]
    cfg.write_text(json.dumps({"bogus": 1}))
    assert cli.main(["gram", "--config", str(cfg)]) == 2
    assert cli.main(["gram", "--config", str(tmp_path / "missing.json")]) == 2


def test_mr2_zero_bracket_exit_1(tmp_path):
    cfg = tmp_path / "z.json"
    eye = [[1, 0], [0, 1]]
    cfg.write_text(json.dumps({"system": "custom", "custom": {
        "m_a": 2, "bracket": [[0, 0], [0, 0]], "ad_actions": [eye] * 4, "z_actions": [1] * 4}}))
    assert cli.main(["mr2", "--config", str(cfg), "--quiet"]) == 1


def test_mr2_sweep(tmp_path):
    code, rep = report(["mr2", "--sweep-p", "5,7", "--trials", "3"], tmp_path)
    assert code == 0
    assert len(rep["result"]["instances"]) == 6
    assert all(r["anti_triangular"] for r in rep["result"]["instances"])


def test_power_check(tmp_path):
    code, rep = report(["power-check", "--p", "7", "--s", "3", "--trials", "30"], tmp_path)
    assert code == 0 and rep["result"]["results"][0]["closed_form_mismatches"] == 0


def test_lift_and_determinism(tmp_path):
    args = ["lift", "--p", "5", "--trials", "5", "--seed", "3"]
    code, a = report(args, tmp_path)
    _, b = report(args, tmp_path)
    assert code == 0 and a["result"]["lifted"] == 5
    a.pop("timing"), b.pop("timing")
    assert cli.render(a) == cli.render(b)
    assert "finite precision" in a["result"]["note"]


def test_delta_probe_and_validate(tmp_path):
    code, rep = report(["delta-probe", "--p", "7", "--target-precision", "2"], tmp_path)
    assert code == 0 and rep["result"]["radical_bound_ok"]
    code, rep = report(["delta-probe", "--levi", "trivial", "--s", "2", "--q-exponent", "2",
                        "--target-precision", "2"], tmp_path)
    assert code == 1 and rep["result"]["mr1_proxy"] is False
    assert cli.main(["validate", "--quiet"]) == 0


def test_stdout_json(capsys):
    assert cli.main(["validate", "--out", "-"]) == 0
    assert json.loads(capsys.readouterr().out)["command"] == "validate"


def test_human_summary(capsys):
    cli.main(["cohomology", "--system", "trivial"])
    out = capsys.readouterr().out
    assert "dims [1, 4, 1]" in out and out.strip().endswith("PASS")


def test_parser_requires_command():
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 2
