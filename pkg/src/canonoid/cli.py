"""Command-line runner for session files.

Exit status: 0 when everything ran, 1 on any parse, usage or command error,
2 when ``--assert`` is given and an expectation (or the identity suite)
failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .commands import Options, Report, run_command
from .dsl import Session, safe_feed
from .symplectic import CONVENTION

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_ASSERT = 2


def run_text(text: str, opts: Options = None):
    """Run a session; returns ``(session, reports, parse_errors)``."""
    opts = opts or Options()
    session = Session()
    reports: List[Report] = []
    errors: List[dict] = []
    pending = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.split("#", 1)[0].strip()
        # a command runs once its expect lines are in, before anything else
        if pending is not None and stripped and stripped.split(None, 1)[0] != "expect":
            reports.append(run_command(session, pending, opts))
            pending = None
        cmd, err = safe_feed(session, raw, lineno)
        if err is not None:
            errors.append(err.to_dict())
        elif cmd is not None:
            pending = cmd
    if pending is not None:
        reports.append(run_command(session, pending, opts))
    return session, reports, errors


def failed_verdicts(reports: List[Report]) -> int:
    bad = 0
    for r in reports:
        bad += sum(1 for e in r.expectations if not e["ok"])
        if r.command.split()[0] == "identities" and r.verdict.get("passed") is False:
            bad += 1
    return bad


def build_document(invocation: str, session: Session, reports, errors) -> dict:
    all_errors = list(errors)
    for r in reports:
        all_errors.extend(r.unexpected_errors)
    return {
        "command": invocation,
        "verdict": {
            "ok": not all_errors and failed_verdicts(reports) == 0,
            "reports": len(reports),
            "errors": len(all_errors),
            "failed_expectations": failed_verdicts(reports),
        },
        "witnesses": {"bindings": session.describe()},
        "convention": CONVENTION,
        "errors": all_errors,
        "reports": [r.to_dict() for r in reports],
    }


def _fmt(value, indent):
    pad = " " * indent
    if isinstance(value, list):
        if value and isinstance(value[0], dict):
            return "".join(f"\n{pad}- " + ", ".join(f"{k}={v}" for k, v in item.items()) for item in value)
        return "[" + ", ".join(str(v) for v in value) + "]"
    if isinstance(value, dict):
        return "".join(f"\n{pad}{k}: {_fmt(v, indent + 2)}" for k, v in value.items())
    return str(value)


def render_text(doc: dict) -> str:
    out = [f"convention: {doc['convention']}"]
    for r in doc["reports"]:
        out.append("")
        out.append(f"[line {r['line']}] {r['command']}")
        for k, v in r["verdict"].items():
            out.append(f"  {k}: {_fmt(v, 4)}")
        for k, v in r["witnesses"].items():
            if k == "notes":
                continue
            out.append(f"  {k}: {_fmt(v, 4)}")
        for e in r["errors"]:
            out.append(f"  error [{e['code']}]: {e['message']}")
        for e in r["expectations"]:
            mark = "ok" if e["ok"] else "FAILED"
            extra = "" if e["ok"] else f" (actual: {e.get('actual')})"
            out.append(f"  expect {e['key']} {e['op']} {e['expected']}: {mark}{extra}")
    top = [e for e in doc["errors"] if not any(e in r["errors"] for r in doc["reports"])]
    for e in top:
        where = f"line {e.get('line')}, col {e.get('column')}: " if e.get("line") else ""
        out.append(f"error [{e['code']}]: {where}{e['message'].split(': ', 1)[-1] if where else e['message']}")
    v = doc["verdict"]
    out.append("")
    out.append(f"{v['reports']} report(s), {v['errors']} error(s), {v['failed_expectations']} failed expectation(s)")
    return "\n".join(out) + "\n"


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="canonoid",
        description="Run a canonoid session file (or standard input).",
    )
    ap.add_argument("session", nargs="?", default="-", help="session file, or '-' for standard input")
    ap.add_argument("--json", action="store_true", help="print one JSON document")
    ap.add_argument("--assert", dest="assert_", action="store_true",
                    help="exit 2 if an expectation or the identity suite fails")
    ap.add_argument("--seed", type=int, default=0, help="seed for the identity suite")
    ap.add_argument("--budget", type=int, default=None, help="default iteration cap for master/observable")
    ap.add_argument("--bound", type=int, default=None, help="default degree bound for gauge")
    ap.add_argument("--workers", type=int, default=None, help="threads for the identity suite")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        if args.session == "-":
            text = sys.stdin.read()
        else:
            with open(args.session, encoding="utf-8") as fh:
                text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        print(f"canonoid: cannot read {args.session}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for flag in ("budget", "bound"):
        value = getattr(args, flag)
        if value is not None and value < 1:
            print(f"canonoid: --{flag} must be >= 1", file=sys.stderr)
            return EXIT_ERROR
    opts = Options(seed=args.seed, budget=args.budget, bound=args.bound, workers=args.workers)
    session, reports, errors = run_text(text, opts)
    invocation = "canonoid " + " ".join(argv if argv is not None else sys.argv[1:])
    doc = build_document(invocation.strip(), session, reports, errors)
    if args.json:
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        sys.stdout.write(render_text(doc))
    if doc["verdict"]["errors"]:
        return EXIT_ERROR
    if args.assert_ and doc["verdict"]["failed_expectations"]:
        return EXIT_ASSERT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
