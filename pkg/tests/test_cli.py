import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from canonoid.cli import main, run_text
from canonoid.commands import Options, Report, format_observable, run_command
from canonoid.dsl import parse_session
from canonoid.symplectic import CONVENTION

from conftest import S1

ROOT = Path(__file__).resolve().parent.parent
SESSIONS = sorted((ROOT / "sessions").glob("*.txt"))
q, p = S1.coords

FREE = """space n=1 coords q,p
field G = p d/dq
field DP = d/dp
scalar H = 1/2*p^2
scalar Gneg = -q
form W2 = dq^dp
"""


def one(body, opts=None):
    session, reports, errors = run_text(FREE + body, opts)
    assert not errors, errors
    assert len(reports) == 1
    return reports[0]


def test_master_example():
    r = one("master field=DP wrt G")
    assert r.verdict["degree"] == 1
    assert r.witnesses["chain"] == ["d/dp", "d/dq", "0"]
    assert r.convention == CONVENTION


def test_gauge_example():
    r = run_text("space n=1\nfield G = p d/dq - q d/dp\nform A = p dq\n"
                 "gauge strong alpha=A wrt G bound 8")[1][0]
    assert r.verdict == {"status": "InfeasibleAtBound", "condition": "strong", "bound": 8}


def test_poisson_example():
    assert one("poisson Gneg H").witnesses["value"] == "-p"


def test_type_mismatch_on_two_form():
    r = one("master W2 wrt G")
    assert r.errors[0]["code"] == "type_mismatch"


def test_unknown_binding():
    r = one("classify Nope")
    assert r.errors[0]["code"] == "unknown_binding"
    assert r.errors[0]["line"] == 7


@pytest.mark.parametrize(
    "cmd, code",
    [
        ("gauge sideways alpha=W2 wrt G bound 2", "usage_error"),
        ("master DP", "usage_error"),
        ("master DP wrt G extra", "usage_error"),
        ("master DP wrt G budget 0", "usage_error"),
        ("master DP wrt G budget 99999", "limit_exceeded"),
        ("identities group nothing", "usage_error"),
        ("poisson H", "usage_error"),
        ("master field=H wrt G", "type_mismatch"),
        ("classify DP omega W2", "type_mismatch"),
        ("liouville W2", "wrong_degree"),
        ("gauge strong alpha=W2 wrt G", "usage_error"),
    ],
)
def test_command_errors(cmd, code):
    r = one(cmd)
    assert r.errors and r.errors[0]["code"] == code


def test_flags_supply_defaults():
    body = "form A = p dq\ngauge strong alpha=A wrt G"
    r = one(body, Options(bound=2))
    assert r.verdict["status"] == "Solved" and r.witnesses["f"] == "-q*p"
    r = one("field Z = q^2 d/dp\nmaster Z wrt G", Options(budget=2))
    assert r.verdict["degree"] is None and r.verdict["budget"] == 2


def test_observable_text():
    assert format_observable((q, p)) == "q - p*t"
    assert format_observable((q ** 2, 2 * q * p, 2 * p ** 2)) == "q^2 - 2*q*p*t + p^2*t^2"
    assert format_observable((p + q, p)) == "p + q - p*t"


def test_report_round_trip():
    r = one("master scalar=Gneg wrt G\nexpect chain = (-q, -p, 0)")
    d = json.loads(json.dumps(r.to_dict()))
    assert Report.from_dict(d) == r


def test_expectations():
    r = one("master scalar=Gneg wrt G\nexpect degree = 1\nexpect chain ~ (-q + 4, -p, 0)\n"
            "expect hamiltonian_degree = 0\nexpect nope = 1")
    oks = [e["ok"] for e in r.expectations]
    assert oks == [True, True, False, False]
    assert "no key" in r.expectations[3]["message"]


def test_expected_error_is_not_an_error():
    _, reports, _ = run_text(FREE + "master W2 wrt G\nexpect error = type_mismatch")
    assert reports[0].ok and not reports[0].unexpected_errors


def test_commands_see_later_bindings_only_after_definition():
    _, reports, errors = run_text(FREE + "classify X\nfield X = q d/dq")
    assert reports[0].errors[0]["code"] == "unknown_binding"


# ---- process level ---------------------------------------------------------

def run_main(args, stdin="", capsys=None, monkeypatch=None):
    monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(args)
    return code, capsys.readouterr().out


def test_main_json_document(capsys, monkeypatch):
    code, out = run_main(["--json"], FREE + "master field=DP wrt G\nexpect degree = 1", capsys, monkeypatch)
    doc = json.loads(out)
    assert code == 0
    assert set(doc) >= {"command", "verdict", "witnesses", "convention", "errors"}
    assert doc["convention"] == CONVENTION
    assert doc["witnesses"]["bindings"]["G"] == "field p d/dq"
    assert doc["reports"][0]["verdict"]["degree"] == 1


def test_main_assert_exit_codes(capsys, monkeypatch):
    text = FREE + "master field=DP wrt G\nexpect degree = 2"
    assert run_main(["--assert"], text, capsys, monkeypatch)[0] == 2
    assert run_main([], text, capsys, monkeypatch)[0] == 0


def test_main_parse_error_exit_code(capsys, monkeypatch):
    code, out = run_main([], FREE + "scalar X = )", capsys, monkeypatch)
    assert code == 1
    assert "syntax_error" in out and "line 7" in out


def test_main_text_output(capsys, monkeypatch):
    code, out = run_main([], FREE + "poisson Gneg H", capsys, monkeypatch)
    assert code == 0
    assert out.startswith("convention: " + CONVENTION)
    assert "value: -p" in out


def test_main_missing_file(capsys):
    assert main(["/nonexistent/session.txt"]) == 1


def test_main_bad_flag(capsys):
    assert main(["--budget", "0"]) == 1
    assert main(["--no-such-flag"]) == 1


@pytest.mark.parametrize("path", SESSIONS, ids=lambda p: p.name)
def test_corpus_session(path, capsys):
    assert main(["--json", "--assert", str(path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["verdict"]["ok"]
    assert all(r["expectations"] for r in doc["reports"])


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "canonoid", "--json", "-"],
        input=FREE + "poisson Gneg H", capture_output=True, text=True, timeout=60,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["reports"][0]["witnesses"]["value"] == "-p"
