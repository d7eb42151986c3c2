import json
import subprocess
import sys

import pytest

from simplelat.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_dim_with_oracle(capsys):
    code, out, _ = run(capsys, "dim", "II_(2,10)()", "--k", "6", "--oracle")
    data = json.loads(out)
    assert code == 0 and data["dimM"] == 1 and data["dimS"] == 0 and data["oracle_agrees"]


def test_dim_low_weight_reports_invariants_only(capsys):
    code, out, _ = run(capsys, "dim", "II_(2,4)(3^+1)", "--k", "1")
    data = json.loads(out)
    assert code == 0 and data["dimM"] is None


def test_gauss_check(capsys):
    code, out, _ = run(capsys, "gauss", "II_(2,4)(2_II^+4 3^+1)", "--check")
    data = json.loads(out)
    assert code == 0 and all(r["bruteforce_agrees"] for r in data["gauss"])


def test_classify_level(capsys, tmp_path):
    man = tmp_path / "m.json"
    code, out, _ = run(capsys, "classify", "--level", "5", "--manifest", str(man))
    rows = out.strip().splitlines()
    assert code == 0 and rows[0] == "level\tgenus\tn\tdim_S" and rows[1:] == ["5\tII_(2,6)(5^+1)\t6\t0"]
    assert json.loads(man.read_text())["simple_count"] == 1


def test_eis_table(capsys):
    code, out, _ = run(capsys, "eis", "--case", "level3", "--count", "6")
    lines = out.splitlines()
    assert lines[1] == "q(gamma,m)\t-2\t-6\t-18\t-26\t-48\t-54"
    assert lines[3] == "q(0,m)\t-36\t0"


def test_search_singular(capsys):
    code, out, _ = run(capsys, "search-singular", "--genus", "II_(2,4)(3^+5)")
    data = json.loads(out)
    assert code == 0 and len(data["candidates"]) == 1 and data["candidates"][0]["weight"] == "1"


def test_search_unavailable_provider(capsys):
    code, out, _ = run(capsys, "search-singular", "--genus", "II_(2,8)(7^+1)")
    assert code == 0 and json.loads(out)["status"] == "provider unavailable"


def test_lift(capsys):
    code, out, _ = run(capsys, "lift", "--case", "level3", "--truncation", "4")
    data = json.loads(out)
    assert code == 0 and data["constant_term"] == 2 and data["integral"]
    assert data["coefficient_formula_check"]["passed"]
    assert {p["m"] for p in data["principal_part"]} == {"-1/3"}


def test_expand_product(capsys):
    code, out, _ = run(capsys, "expand-product", "--case", "level3-cone", "--height", "4")
    assert code == 0 and json.loads(out)["verification"]["passed"]
    code, out, _ = run(capsys, "expand-product", "--case", "level3-weyl", "--height", "6")
    assert code == 0 and json.loads(out)["identity_holds"]


@pytest.mark.parametrize(
    "argv",
    [
        ["dim", "II_(2,4)(3^+5", "--k", "3"],
        ["classify", "--threads", "0"],
        ["search-singular", "--genus", "II_(2,4)(3^+5)", "--m-floor", "abc"],
        ["lift", "--case", "level5"],
        [],
    ],
)
def test_malformed_input_exits_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_console_entry_point_runs():
    res = subprocess.run([sys.executable, "-m", "simplelat.cli", "dim", "II_(2,4)(3^+5)", "--k", "3"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["dimS"] == 0


def test_deterministic_output(capsys):
    first = run(capsys, "eis", "--case", "level6", "--count", "8")[1]
    assert run(capsys, "eis", "--case", "level6", "--count", "8")[1] == first


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == 0 and "FAIL" not in out
