from pathlib import Path

import pytest

from itlmc.cli import main

CORPUS = Path(__file__).resolve().parents[1] / "src" / "itlmc" / "corpus"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse(capsys):
    code, out, _ = run(capsys, "parse", "~p | O(q & false)")
    assert code == 0
    assert "(p -> false) | O (q & false)" in out
    assert "fragments: db dw b w d" in out


def test_parse_error_exit_3(capsys):
    code, _, err = run(capsys, "parse", "p <-> q <-> r")
    assert code == 3
    assert "non-associative" in err


def test_check_bundled_model_by_relative_path(capsys):
    code, out, _ = run(
        capsys, "check", "--model", "corpus/poset/fig4-fs.dpm",
        "(O p -> O q) -> O(p -> q)",
    )
    assert code == 1
    assert "falsified at: w" in out


def test_check_valid_formula_exits_0(capsys):
    code, out, _ = run(
        capsys, "check", "--model", str(CORPUS / "poset/fig4-fs.dpm"), "p -> p"
    )
    assert code == 0
    assert "valid" in out


def test_check_missing_file_exits_3(capsys):
    code, _, err = run(capsys, "check", "--model", "no-such.dpm", "p")
    assert code == 3 and "error" in err


def test_real_check(capsys):
    code, out, _ = run(
        capsys, "real-check", "--system", "corpus/real/r-kinked.rds", "[*]p"
    )
    assert code == 1
    assert "(-inf, 0)" in out and "extrapolated" in out

    code, out, _ = run(
        capsys, "real-check", "--system", "corpus/real/r-kinked.rds",
        "~O p & O~~p -> O q | ~O q",
    )
    assert code == 0
    assert "valid" in out


def test_real_check_undetermined_exits_2(capsys):
    code, out, _ = run(
        capsys, "real-check", "--system", "corpus/real/r-double.rds",
        "--caps", "iter=2,restart=1,window=2", "[]p",
    )
    assert code == 2
    assert "undetermined" in out


def test_real_check_bad_caps_exits_3(capsys):
    code, _, err = run(
        capsys, "real-check", "--system", "corpus/real/r-double.rds",
        "--caps", "iter=soon", "[]p",
    )
    assert code == 3


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", "--class", "p", "--bound", "2", "p | ~p")
    assert code == 1
    assert "countermodel" in out and "falsified at:" in out

    code, out, _ = run(
        capsys, "validate", "--class", "p", "--bound", "3",
        "(O p -> O q) -> O(p -> q)",
    )
    assert code == 0
    assert "valid in class p up to 3 worlds" in out


def test_validate_bound_too_large_exits_3(capsys):
    code, _, err = run(capsys, "validate", "--class", "e", "--bound", "7", "p")
    assert code == 3 and "maximum" in err


def test_prove(capsys):
    code, out, _ = run(
        capsys, "prove", "--logic", "ITL.db", str(CORPUS / "deriv/d-wh.drv")
    )
    assert code == 0
    assert "accepted (17 lines)" in out

    code, out, _ = run(
        capsys, "prove", "--logic", "ITL.d", str(CORPUS / "deriv/d-wh.drv")
    )
    assert code == 1
    assert "rejected at line" in out


def test_prove_unknown_logic_exits_3(capsys):
    code, _, err = run(
        capsys, "prove", "--logic", "QTL.db", str(CORPUS / "deriv/d-wh.drv")
    )
    assert code == 3 and "unknown logic" in err


def test_paper_suite_filtered(capsys):
    code, out, _ = run(capsys, "paper-suite", "--filter", "fig5-cem")
    assert code == 0
    assert "PASS fig5-cem/failure-at-root" in out


def test_paper_suite_unknown_filter_exits_3(capsys):
    code, _, err = run(capsys, "paper-suite", "--filter", "zzz")
    assert code == 3


def test_records_format(capsys):
    code, out, _ = run(
        capsys, "--format", "records", "check",
        "--model", "corpus/poset/fig5-cem.dpm", "~O p & O~~p -> O q | ~O q",
    )
    assert code == 1
    lines = dict(l.split("=", 1) for l in out.strip().splitlines())
    assert lines["verdict"] == "falsified"
    assert lines["world"] == "w0"


def test_separate_runs_clean(capsys):
    code, out, _ = run(capsys, "separate")
    assert code == 0
    assert "18/18 edges verified" in out
