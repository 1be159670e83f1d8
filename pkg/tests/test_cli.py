import io
import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from cinfty.certcheck import check_stream
from cinfty.cli import RunOptions, Session, main, run_script, tokenize, ScriptError
from cinfty.verdict import QueryBudget

HERE = Path(__file__).parent
SCRIPTS = sorted((HERE / "scripts").glob("*.cinf"))


def _run(text: str, fmt="text", budget=None, **kw) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    opts = RunOptions(fmt=fmt, timing=False, **kw)
    code = run_script(text, out, err, Session(budget or QueryBudget()), opts)
    return code, out.getvalue(), err.getvalue()


# golden files

@pytest.mark.parametrize("script", SCRIPTS, ids=lambda p: p.stem)
def test_structured_golden(script):
    code, out, _ = _run(script.read_text(), "structured")
    assert code == 0
    assert out == (HERE / "golden" / f"{script.stem}.jsonl").read_text()


@pytest.mark.parametrize("script", SCRIPTS, ids=lambda p: p.stem)
def test_text_golden(script):
    code, out, _ = _run(script.read_text())
    assert code == 0
    assert out == (HERE / "golden" / f"{script.stem}.txt").read_text()


def test_empty_and_comment_only_scripts():
    for text in ("", "\n\n", "# nothing here\n   # indented comment\n"):
        for fmt in ("text", "structured"):
            assert _run(text, fmt) == (0, "", "")


# examples

def test_radical_member_line():
    code, out, _ = _run("ring I vars=1 relations=[x0*(x0-1)]\nradical-member ring=I f=x0*(x0-1)\n")
    assert code == 0
    assert out.splitlines()[-1] == "PROVED"


def test_nullstellensatz_line():
    code, out, _ = _run("ring A vars=1 relations=[x0^2+1]\nnullstellensatz ring=A\n")
    assert code == 0 and out.splitlines()[-1] == "PROVED (ring trivial)"


def test_malformed_term_reports_position():
    code, _, err = _run("ring R vars=1\nradical-member ring=R f=x0+*2\n")
    assert code == 64
    assert "line 2, column 28" in err


@pytest.mark.parametrize("text", [
    "ring R vars=1\nradical-member ring=S f=x0\n",
    "ring R vars=1\nradical-member ring=R f=x1\n",
    "ring R vars=1\nring R vars=2\n",
    "frobnicate x=1\n",
    "ring R vars=1\nsupp ring=R point=1/0\n",
    "ring R vars=1 relations=[x0]\nsupp ring=R point=1\n",
])
def test_semantic_errors_exit_64(text):
    code, _, err = _run(text)
    assert code == 64
    assert err.startswith("error: line 2") or err.startswith("error: line 1")


def test_failed_expectation_exits_1():
    code, out, _ = _run("ring A vars=1 relations=[x0]\nnullstellensatz ring=A expect PROVED\n")
    assert code == 1
    assert "[expected PROVED]" in out


def test_strict_unknown_exits_2():
    text = "ring R vars=1\nradical-member ring=R f=bump(x0)-1/4\n"
    tiny = QueryBudget(max_depth=2, min_width=Fraction(1, 4), max_boxes=4)
    code, out, _ = _run(text, budget=tiny)
    assert code == 0 and "UNKNOWN" in out
    code, _, _ = _run(text, budget=tiny, strict=True)
    assert code == 2


def test_tokenizer():
    cmd = tokenize('sat-member ring=R S=[x0; x0-1] g="x0 - 1" expect REFUTED  # note', 3)
    assert cmd.name == "sat-member"
    assert cmd.kwargs["g"].value == "x0 - 1"
    assert cmd.kwargs["S"].value == "[x0; x0-1]"
    assert cmd.expect.value == "REFUTED"
    assert tokenize("   # only a comment", 1) is None
    with pytest.raises(ScriptError):
        tokenize("leq left=[x0", 1)


# determinism and certificates

@pytest.mark.parametrize("script", SCRIPTS, ids=lambda p: p.stem)
def test_structured_output_independent_of_workers(script):
    outs = {_run(script.read_text(), "structured", QueryBudget(workers=w), certificates=True)[1]
            for w in (1, 4, 8)}
    assert len(outs) == 1


@pytest.mark.parametrize("script", SCRIPTS, ids=lambda p: p.stem)
def test_certificates_revalidate(script):
    _, out, _ = _run(script.read_text(), "structured", certificates=True)
    report = io.StringIO()
    assert check_stream(out, report) == 0
    last = report.getvalue().splitlines()[-1]
    valid, total = last.split()[0].split("/")
    assert valid == total and int(total) > 0


def test_checker_rejects_tampered_certificate():
    _, out, _ = _run("ring B vars=1 relations=[x0]\nnullstellensatz ring=B\n", "structured",
                     certificates=True)
    rec = json.loads(out.splitlines()[-1])
    rec["trace"][0]["witness"] = {"point": ["1/3"]}
    report = io.StringIO()
    assert check_stream(json.dumps(rec), report) == 1
    assert "FAILED" in report.getvalue()


def test_structured_records_are_complete():
    _, out, _ = _run((HERE / "scripts" / "nullstellensatz.cinf").read_text(), "structured",
                     certificates=True)
    recs = [json.loads(line) for line in out.splitlines()]
    queries = [r for r in recs if r["verdict"] is not None]
    assert [r["verdict"] for r in queries] == ["PROVED", "REFUTED", "PROVED"]
    assert all(r["expect_ok"] for r in queries)
    assert queries[1]["witness"] == {"point": ["0"]}
    assert all(r["trace"] for r in queries)


# command line

def test_main_usage_errors(capsys):
    with pytest.raises(SystemExit) as err:
        main(["run"])
    assert err.value.code == 64
    with pytest.raises(SystemExit) as err:
        main(["run", "x.cinf", "--format", "yaml"])
    assert err.value.code == 64
    assert main(["run", str(HERE / "no-such-file.cinf")]) == 64
    assert main(["run", str(SCRIPTS[0]), "--box", "3,1"]) == 64


def test_main_runs_script(capsys):
    assert main(["run", str(HERE / "scripts" / "nullstellensatz.cinf"), "--depth", "30"]) == 0
    assert "PROVED (ring trivial)" in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cinfty", "run", "-", "--format", "structured",
                           "--no-timing"], input="ring R vars=1\nsemireal ring=R fs=[x0]\n",
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout.splitlines()[-1])["verdict"] == "PROVED"
