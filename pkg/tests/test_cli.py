import csv
import io
import subprocess
import sys

import pytest

from supercoh import cli
from supercoh.examples import BUILTINS, EXTRA
from supercoh.verify import FAIL, Check


def section(text, title):
    """Rows of the CSV table headed '## title'."""
    lines = text.splitlines()
    start = lines.index(f"## {title}") + 1
    end = start
    while end < len(lines) and lines[end] and not lines[end].startswith("#"):
        end += 1
    return list(csv.DictReader(io.StringIO("\n".join(lines[start:end]))))


def ok(argv):
    code, text = cli.run(argv)
    assert code == cli.EXIT_OK, text
    return text


def test_deterministic_output():
    argv = ["specseq", "abelian-1-1", "--pages", "0..2", "-N", "3"]
    assert ok(argv) == ok(argv)


def test_header():
    text = ok(["check", "borel", "-p", "5"])
    assert text.startswith("# supercoh-report v1\n# command: supercoh check borel -p 5\n")
    assert "# algebra: borel p=5 dim=2|0" in text


def test_k1bar_both_methods():
    text = ok(["cohomology", "k1bar", "--method", "both", "-N", "5"])
    assert [int(r["dim"]) for r in section(text, "betti restricted may")] == [1] * 6
    assert [int(r["dim"]) for r in section(text, "betti restricted bar")] == [1] * 6
    assert section(text, "verification")[0]["status"] == "pass"


def test_k0bar_and_abelian():
    text = ok(["cohomology", "k0bar", "-N", "5"])
    assert [int(r["dim"]) for r in section(text, "betti restricted may")] == [1] * 6
    text = ok(["cohomology", "abelian-1-1", "-N", "4"])
    assert [int(r["dim"]) for r in section(text, "betti restricted may")] == [1, 2, 3, 4, 5]


def test_lie_cohomology_of_borel():
    text = ok(["cohomology", "borel", "--lie", "-N", "2"])
    rows = section(text, text.split("## ")[1].splitlines()[0])
    assert [int(r["dim"]) for r in rows] == [1, 1, 0]


def test_ring_is_labelled_exploratory():
    text = ok(["ring", "abelian-1-1"])
    assert "# exploratory" in text
    assert [int(r["dim"]) for r in section(text, "ring")] == [1, 2, 3, 4, 5]


def test_verify_low_degree_reports_skip():
    text = ok(["verify", "k0bar", "-N", "1"])
    rows = {r["check"]: r for r in section(text, "verification")}
    assert rows["special cocycles"]["status"] == "skipped"


def test_examples_listing():
    names = {r["name"] for r in section(ok(["examples"]), "examples")}
    assert names == set(BUILTINS)
    names = {r["name"] for r in section(ok(["examples", "--extra"]), "examples")}
    assert names == set(BUILTINS) | set(EXTRA)


def test_specseq_verify_passes():
    text = ok(["specseq", "borel", "--reindex", "jantzen", "--pages", "0..1", "-N", "3", "--verify"])
    assert all(r["status"] != "FAIL" for r in section(text, "verification"))


def test_file_input_and_module(tmp_path):
    path = tmp_path / "b.alg"
    path.write_text("p = 3\neven = [h, e]\n[h, e] = 2 e\nh^[p] = h\n"
                    "module two\nparity = [0, 0]\nact h = [[1, 0], [0, 2]]\nact e = [[0, 1], [0, 0]]\nend\n")
    text = ok(["cohomology", str(path), "--module", "two", "-N", "2"])
    assert "fingerprint" in text


def test_exit_code_input(tmp_path):
    path = tmp_path / "bad.alg"
    path.write_text("p = 3\neven = [h]\n[h, q] = h\n")
    code, msg = cli.run(["check", str(path)])
    assert code == cli.EXIT_INPUT and "line 3" in msg
    code, msg = cli.run(["check", "no-such-example"])
    assert code == cli.EXIT_INPUT
    path.write_text("p = 3\neven = [a, b, c]\n[a, b] = c\n[b, c] = a\n")
    code, msg = cli.run(["check", str(path)])
    assert code == cli.EXIT_INPUT and "ValidationError" in msg


def test_exit_code_budget():
    code, msg = cli.run(["cohomology", "sl2", "--method", "bar", "-N", "8", "--budget", "1000"])
    assert code == cli.EXIT_BUDGET and "budget" in msg


def test_exit_code_failed_check(monkeypatch):
    monkeypatch.setattr(cli, "verify_battery", lambda *a, **k: [Check("forced", FAIL, "x")])
    code, text = cli.run(["verify", "k0bar"])
    assert code == cli.EXIT_FAIL and "forced,FAIL" in text


def test_console_script_writes_file(tmp_path):
    out = tmp_path / "r.txt"
    res = subprocess.run([sys.executable, "-m", "supercoh.cli", "-o", str(out), "check", "k1bar"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and out.read_text().startswith("# supercoh-report v1")


def test_errors_go_to_stderr():
    res = subprocess.run([sys.executable, "-m", "supercoh.cli", "check", "nope"], capture_output=True, text=True)
    assert res.returncode == 2 and res.stdout == "" and "error" in res.stderr


@pytest.mark.parametrize("spec,want", [("1", [1]), ("0..2", [0, 1, 2])])
def test_parse_pages(spec, want):
    assert list(cli.parse_pages(spec)) == want
