import json

import pytest

from bochvar.algebra_core import DATA_DIR
from bochvar.cli import main


def run_json(capsys, *argv):
    code = main([*argv, "--json"])
    return code, json.loads(capsys.readouterr().out)


@pytest.mark.parametrize("algebra, code", [("b4+b2", 5), ("wke", 6), ("b2", 4), ("b4.alg", 4)])
def test_classify_exit_codes(algebra, code):
    assert main(["classify", algebra]) == code


def test_classify_json(capsys):
    code, out = run_json(capsys, "classify", "b4+b2")
    assert code == 5
    assert out["verdict"] == "NBCA_proper"
    assert out["axioms"] is None


def test_eval_prints_the_value(capsys):
    assert main(["eval", "--set", "x=H", "J1(x)"]) == 0
    assert capsys.readouterr().out.strip() == "1"


def test_eval_rejects_a_bad_assignment(capsys):
    assert main(["eval", "--set", "x", "J1(x)"]) == 1
    assert "name=element" in capsys.readouterr().err


def test_check_reports_the_counterexample(capsys):
    code, out = run_json(capsys, "check", "--algebra", "wke", "x & (x | y) = x")
    assert code == 1
    assert out["holds"] is False
    assert out["counterexample"] == {"x": "1", "y": "H"}


def test_check_passivity(capsys):
    assert main(["check", "--passivity", "-a", "b4+b2", "J1 x = 1 => y = 1"]) == 0
    code, out = run_json(capsys, "check", "--passivity", "J1 x = 1 => y = 1")
    assert code == 1
    assert out["realized"] == {"x": "H", "y": "1"}


def test_consequence(capsys):
    assert main(["consequence", "J1(x) |- y"]) == 1
    assert main(["consequence", "-a", "b4+b2", "J1(x) |- y"]) == 0
    code, out = run_json(capsys, "consequence", "x, x -> y |- y")
    assert code == 0
    assert out["matrix"] == "⟨wke, {1}⟩"


def test_theorem(capsys):
    assert main(["theorem", "J2 x | ~J2 x"]) == 0
    code, out = run_json(capsys, "theorem", "x | ~x")
    assert code == 1
    assert out["counterexample"] == {"x": "H"}


def test_theorem_needs_a_formula():
    with pytest.raises(SystemExit) as exc:
        main(["theorem"])
    assert exc.value.code == 2


def test_deduction_instance():
    assert main(["deduction", "x", "J2 x"]) == 0


def test_prove_check(capsys):
    assert main(["prove-check", str(DATA_DIR / "j2-identity.drv")]) == 0
    code, out = run_json(capsys, "prove-check", str(DATA_DIR / "mp-order.drv"))
    assert code == 1
    assert out["step"] == 3


def test_decompose_writes_the_system(tmp_path, capsys):
    target = tmp_path / "wke.sys"
    code, out = run_json(capsys, "decompose", "wke", "--output", str(target))
    assert code == 0
    assert [f["elements"] for f in out["fibers"]] == [["1", "0"], ["H"]]
    assert target.read_text().startswith("system")


def test_compose(tmp_path):
    target = tmp_path / "wke.alg"
    assert main(["compose", str(DATA_DIR / "wke.sys"), "-o", str(target)]) == 0
    assert main(["classify", str(target)]) == 6


def test_compose_without_j_fails(capsys):
    assert main(["compose", str(DATA_DIR / "copy.sys")]) == 1
    assert "bottom transitions not injective" in capsys.readouterr().err


def test_retract(capsys):
    assert main(["retract", "wke"]) == 1
    code, out = run_json(capsys, "retract", "b4+b2")
    assert code == 0
    assert out["atom"] == "a"


def test_amalgamate(capsys):
    code, out = run_json(
        capsys, "amalgamate", "b2", "wke", "wke", "--i", "1->1 0->0", "--j", "1->1 0->0",
    )
    assert code == 0
    assert out["valid"] is True
    assert out["pairs"] == 1
    assert out["amalgam"]["size"] == 3


def test_amalgamate_rejects_a_fixpoint_in_nbca():
    argv = ["amalgamate", "b2", "wke", "wke", "--class", "nbca", "--i", "1->1 0->0", "--j", "1->1 0->0"]
    assert main(argv) == 1


def test_enumerate(capsys):
    code, out = run_json(capsys, "enumerate", "-n", "4", "-w", "1")
    assert code == 0
    assert out["count"] == 4
    assert [a["name"] for a in out["algebras"]] == ["trivial", "b2", "b2+b1", "b4"]


def test_cep_check():
    assert main(["cep-check"]) == 0


def test_verify_corpus_selected_claim(capsys):
    code, out = run_json(capsys, "verify-corpus", "-n", "4", "-c", "derived-ii.2-stated", "-w", "1")
    assert code == 0
    assert out["results"][0]["grade"] == "PASS"


def test_unknown_algebra(capsys):
    assert main(["classify", "nowhere.alg"]) == 1
    assert "nowhere.alg" in capsys.readouterr().err


def test_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
