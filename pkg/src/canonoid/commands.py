"""Command dispatch and structured reports.

Each command produces a :class:`Report` whose ``verdict`` holds booleans,
integers and short status strings, and whose ``witnesses`` hold objects in
canonical text form (re-parseable in the same session). Exact rationals
appear as strings such as ``"1/2"`` so JSON round trips are lossless.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional

from . import classifiers as cl
from .dsl import Command, Expectation, Session, Token, _Parser, canonical_text, kind_of
from .errors import (
    CanonoidError,
    LimitExceeded,
    ParseError,
    TypeMismatch,
    UnknownBinding,
    UsageError,
)
from .forms import DiffForm, PolyMap, VectorField, ext_d, lie_bracket
from .gauge import gauge_fix_strong, gauge_fix_weak
from .identities import GROUPS, run_suite
from .poly import ScalarPoly, equal_mod_constant
from .symplectic import (
    CONVENTION,
    SymplecticForm,
    canonical_omega,
    homotopy_potential,
    liouville_field,
    poisson,
)
from .twisted import DEFAULT_MAX_ITER, TwistedContext, d_gamma

MAX_BUDGET = 1000


@dataclass
class Options:
    seed: int = 0
    budget: Optional[int] = None
    bound: Optional[int] = None
    workers: Optional[int] = None


@dataclass
class Report:
    command: str
    line: Optional[int] = None
    verdict: Dict[str, object] = field(default_factory=dict)
    witnesses: Dict[str, object] = field(default_factory=dict)
    convention: str = CONVENTION
    errors: List[dict] = field(default_factory=list)
    expectations: List[dict] = field(default_factory=list)
    timing: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(**d)

    @property
    def ok(self) -> bool:
        return not self.unexpected_errors and all(e["ok"] for e in self.expectations)

    @property
    def unexpected_errors(self) -> List[dict]:
        expected = {e["expected"] for e in self.expectations if e["key"] == "error" and e["ok"]}
        return [e for e in self.errors if e["code"] not in expected]


def _frac(x) -> Optional[str]:
    return None if x is None else str(Fraction(x))


def _text(x) -> Optional[str]:
    return None if x is None else canonical_text(x)


# ---- argument parsing -------------------------------------------------------

KEYWORDS = ("wrt", "omega", "budget", "bound", "seed", "cases", "group", "dims", "workers")


@dataclass
class Args:
    positional: List[Token]
    named: Dict[str, Token]
    keywords: Dict[str, List[Token]]


def parse_args(cmd: Command) -> Args:
    toks = cmd.tokens[1:]
    pos, named, kw = [], {}, {}
    i = 0

    def err(msg, t):
        return ParseError(msg, cmd.line, t.col)

    while toks[i].kind != "END":
        t = toks[i]
        if t.kind == "IDENT" and toks[i + 1].kind == "OP" and toks[i + 1].text == "=":
            v = toks[i + 2]
            if v.kind not in ("IDENT", "NUM"):
                raise err(f"expected a name after '{t.text}=', found {v.text or 'end of line'!r}", v)
            if t.text in named:
                raise UsageError(f"{t.text!r} given twice", cmd.line, t.col)
            named[t.text] = v
            i += 3
        elif t.kind == "IDENT" and t.text in KEYWORDS:
            vals = []
            i += 1
            while toks[i].kind in ("IDENT", "NUM") and toks[i].text not in KEYWORDS:
                vals.append(toks[i])
                i += 1
                if toks[i].kind == "OP" and toks[i].text == ",":
                    i += 1
                    continue
                break
            if not vals:
                raise err(f"expected a value after {t.text!r}", toks[i])
            if t.text in kw:
                raise UsageError(f"{t.text!r} given twice", cmd.line, t.col)
            kw[t.text] = vals
        elif t.kind in ("IDENT", "NUM"):
            pos.append(t)
            i += 1
        else:
            raise err(f"unexpected {t.text!r} in command arguments", t)
    return Args(pos, named, kw)


class _Ctx:
    """Per-command helpers: lookups with typed errors."""

    def __init__(self, session: Session, cmd: Command, args: Args, opts: Options):
        self.s = session
        self.cmd = cmd
        self.args = args
        self.opts = opts
        self.used = set()

    def lookup(self, tok: Token, *kinds):
        name = tok.text
        try:
            obj = self.s.bindings[name] if name in self.s.bindings else self.s.resolve(name, self.cmd.line, tok.col)
        except CanonoidError:
            raise UnknownBinding(f"no binding named {name!r}", self.cmd.line, tok.col)
        if kinds and not isinstance(obj, kinds):
            want = " or ".join(_KIND_NAMES[k] for k in kinds)
            raise TypeMismatch(
                f"{self.cmd.word} needs a {want} here, {name!r} is a {kind_of(obj)}", self.cmd.line, tok.col
            )
        return obj

    def positional(self, index: int, what: str) -> Token:
        pos = self.args.positional
        if index >= len(pos):
            last = self.cmd.tokens[-1]
            raise UsageError(f"{self.cmd.word}: missing {what}", self.cmd.line, last.col)
        self.used.add(("pos", index))
        return pos[index]

    def named(self, key: str, required=True) -> Optional[Token]:
        tok = self.args.named.get(key)
        if tok is None and required:
            raise UsageError(f"{self.cmd.word}: missing {key}=<name>", self.cmd.line, self.cmd.tokens[-1].col)
        if tok is not None:
            self.used.add(("named", key))
        return tok

    def keyword(self, key: str, required=False) -> Optional[List[Token]]:
        vals = self.args.keywords.get(key)
        if vals is None and required:
            raise UsageError(f"{self.cmd.word}: missing '{key} <value>'", self.cmd.line, self.cmd.tokens[-1].col)
        if vals is not None:
            self.used.add(("kw", key))
        return vals

    def single(self, key: str, required=False) -> Optional[Token]:
        vals = self.keyword(key, required)
        if vals is None:
            return None
        if len(vals) != 1:
            raise UsageError(f"{key} takes one value", self.cmd.line, vals[1].col)
        return vals[0]

    def integer(self, key: str, default=None, required=False, lo=0, hi=None) -> Optional[int]:
        tok = self.single(key, required and default is None)
        if tok is None:
            return default
        if tok.kind != "NUM":
            raise UsageError(f"{key} needs an integer", self.cmd.line, tok.col)
        value = int(tok.text)
        if value < lo or (hi is not None and value > hi):
            rng = f">= {lo}" if hi is None else f"in {lo}..{hi}"
            cls = LimitExceeded if hi is not None and value > hi else UsageError
            raise cls(f"{key} must be {rng}", self.cmd.line, tok.col)
        return value

    def omega(self) -> SymplecticForm:
        tok = self.single("omega")
        if tok is None:
            return canonical_omega(self.s.space)
        return self.lookup(tok, SymplecticForm)

    def twisted(self) -> TwistedContext:
        gamma = self.lookup(self.single("wrt", required=True), VectorField)
        return TwistedContext(gamma, self.omega())

    def budget(self) -> int:
        default = self.opts.budget if self.opts.budget is not None else DEFAULT_MAX_ITER
        return self.integer("budget", default, lo=1, hi=MAX_BUDGET)

    def finish(self):
        """Reject arguments the command did not consume."""
        for i, tok in enumerate(self.args.positional):
            if ("pos", i) not in self.used:
                raise UsageError(f"{self.cmd.word}: unexpected argument {tok.text!r}", self.cmd.line, tok.col)
        for key, tok in self.args.named.items():
            if ("named", key) not in self.used:
                raise UsageError(f"{self.cmd.word}: unexpected {key}=", self.cmd.line, tok.col)
        for key, vals in self.args.keywords.items():
            if ("kw", key) not in self.used:
                raise UsageError(f"{self.cmd.word}: unexpected {key!r}", self.cmd.line, vals[0].col)


_KIND_NAMES = {
    ScalarPoly: "scalar",
    VectorField: "field",
    DiffForm: "form",
    PolyMap: "map",
    SymplecticForm: "omega",
}


# ---- commands ---------------------------------------------------------------


def _classify(c: _Ctx, report: Report):
    X = c.lookup(c.positional(0, "a field"), VectorField)
    omega = c.omega()
    c.finish()
    res = cl.classify_field(omega, X)
    report.verdict.update(
        locally_hamiltonian=res.locally_hamiltonian,
        canonical_valence=_frac(res.canonical_valence),
        projectively_canonical=res.canonical_valence is not None,
    )
    report.witnesses.update(
        H=_text(res.hamiltonian_witness),
        lie_derivative_omega=_text(res.lie_derivative_omega),
        notes=list(res.notes),
    )


def _canonoid(c: _Ctx, report: Report):
    target = c.lookup(c.positional(0, "a field or map"), VectorField, PolyMap)
    ctx = c.twisted()
    c.finish()
    if isinstance(target, PolyMap):
        v = cl.canonoid_finite(ctx, target)
        report.verdict.update(is_canonoid=v.is_canonoid, valence=_frac(v.valence))
        report.witnesses.update(
            H_prime=_text(v.H_prime),
            defining_form=_text(v.defining_form),
            dynamics_hamiltonian=_text(v.dynamics_hamiltonian),
            notes=list(v.notes),
        )
        return
    v = cl.canonoid_infinitesimal(ctx, target)
    bracket = lie_bracket(target, ctx.gamma)
    report.verdict.update(
        is_canonoid=v.is_canonoid,
        K_is_conserved=v.K_is_conserved,
        bracket_locally_hamiltonian=cl.bracket_hamiltonian(ctx, target).locally_hamiltonian,
    )
    report.witnesses.update(
        K=_text(v.K),
        defining_form=_text(v.defining_form),
        bracket=_text(bracket),
        bracket_hamiltonian_function=_text(v.bracket_hamiltonian_function),
        dynamics_hamiltonian=_text(v.dynamics_hamiltonian),
        notes=list(v.notes),
    )


def _target_for_master(c: _Ctx):
    f_tok = c.named("field", required=False)
    s_tok = c.named("scalar", required=False)
    if f_tok is not None and s_tok is not None:
        raise UsageError("give either field= or scalar=, not both", c.cmd.line, s_tok.col)
    if f_tok is not None:
        return c.lookup(f_tok, VectorField)
    if s_tok is not None:
        return c.lookup(s_tok, ScalarPoly)
    return c.lookup(c.positional(0, "a field or scalar"), VectorField, ScalarPoly)


def _master(c: _Ctx, report: Report):
    target = _target_for_master(c)
    ctx = c.twisted()
    budget = c.budget()
    c.finish()
    if isinstance(target, VectorField):
        v = cl.master_degree(ctx, target, budget)
        report.verdict.update(kind="master_symmetry", degree=v.degree, found=v.found, budget=budget)
    else:
        v = cl.com_degree(ctx, target, budget)
        report.verdict.update(
            kind="constants_generator", degree=v.degree, found=v.found, budget=budget,
            hamiltonian_degree=v.hamiltonian_degree,
        )
    report.witnesses["chain"] = [_text(x) for x in v.iterates]


def format_observable(coeffs) -> str:
    """``sum (-1)^n A_n t^n / n!`` as text."""
    parts = []
    for n, a in enumerate(coeffs):
        term = a * Fraction((-1) ** n, factorial(n))
        if term.is_zero():
            continue
        t = "" if n == 0 else ("t" if n == 1 else f"t^{n}")
        body = str(term)
        if not t:
            parts.append(body)
        elif term.is_constant():
            c = term.constant_term()
            parts.append(t if c == 1 else ("-" + t if c == -1 else f"{body}*{t}"))
        elif term.needs_parens():
            parts.append(f"({body})*{t}")
        else:
            parts.append(f"{body}*{t}")
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def _observable(c: _Ctx, report: Report):
    T = c.lookup(c.positional(0, "a scalar"), ScalarPoly)
    ctx = c.twisted()
    budget = c.budget()
    c.finish()
    v = cl.com_degree(ctx, T, budget)
    report.verdict.update(degree=v.degree, found=v.found, budget=budget)
    if v.found:
        coeffs = cl.conserved_observable(ctx, T, v.degree)
        report.witnesses.update(
            coefficients=[_text(a) for a in coeffs],
            A=format_observable(coeffs),
        )


def _decompose(c: _Ctx, report: Report):
    beta = c.lookup(c.named("beta"), DiffForm)
    alpha = c.lookup(c.named("alpha"), DiffForm)
    G = c.lookup(c.named("G"), ScalarPoly)
    ctx = c.twisted()
    c.finish()
    d = cl.decompose_symmetry(ctx, beta, alpha, G)
    cls_x = cl.classify_field(ctx.omega, d.X_beta)
    checks = {k: v for k, v in vars(d.checks).items()}
    report.verdict.update(
        is_symmetry=d.is_symmetry,
        all_checks=d.all_checks,
        checks=checks,
        d_gamma_beta_zero=d_gamma(ctx, beta).is_zero(),
        X_beta_canonical_valence=_frac(cls_x.canonical_valence),
    )
    report.witnesses.update(
        F=_text(d.F),
        X_beta=_text(d.X_beta),
        bracket_X_beta_gamma=_text(lie_bracket(d.X_beta, ctx.gamma)),
        L_gamma_G=_text(ctx.gamma(G)),
        lie_derivative_omega_X_beta=_text(cls_x.lie_derivative_omega),
    )


def _gauge(c: _Ctx, report: Report):
    mode_tok = c.positional(0, "'strong' or 'weak'")
    if mode_tok.text not in ("strong", "weak"):
        raise UsageError("gauge mode must be 'strong' or 'weak'", c.cmd.line, mode_tok.col)
    alpha = c.lookup(c.named("alpha"), DiffForm)
    ctx = c.twisted()
    bound = c.integer("bound", c.opts.bound, required=True, lo=1, hi=32)
    c.finish()
    if alpha.degree != 1:
        raise TypeMismatch("gauge needs a 1-form alpha", c.cmd.line, c.args.named["alpha"].col)
    solve = gauge_fix_strong if mode_tok.text == "strong" else gauge_fix_weak
    res = solve(ctx, alpha, bound)
    report.verdict.update(status=res.status, condition=res.condition, bound=res.bound)
    if res.solved:
        report.witnesses.update(f=_text(res.f), gauge_fixed_form=_text(res.gauge_fixed_form(alpha)))


def _identities(c: _Ctx, report: Report):
    seed_tok = c.single("seed")
    seed = c.opts.seed if seed_tok is None else c.integer("seed")
    cases = c.integer("cases", 100, lo=1, hi=100000)
    groups = c.keyword("group")
    dims_toks = c.keyword("dims")
    c.finish()
    if groups is not None:
        for g in groups:
            if g.text not in GROUPS:
                raise UsageError(f"unknown group {g.text!r}; choose from {', '.join(GROUPS)}", c.cmd.line, g.col)
        groups = tuple(g.text for g in groups)
    dims = (2, 4)
    if dims_toks is not None:
        if any(t.kind != "NUM" or t.text not in ("2", "4") for t in dims_toks):
            raise UsageError("dims must be 2 and/or 4", c.cmd.line, dims_toks[0].col)
        dims = tuple(sorted({int(t.text) for t in dims_toks}))
    results = run_suite(seed, cases, groups, dims, workers=c.opts.workers)
    failed = [r for r in results if not r.passed]
    report.verdict.update(
        passed=not failed, checks=len(results), failed=len(failed), seed=seed, cases=cases,
    )
    report.witnesses["results"] = [r.to_dict() for r in results]


def _potential(c: _Ctx, report: Report):
    a = c.lookup(c.positional(0, "a form"), DiffForm)
    c.finish()
    pot = homotopy_potential(a)
    report.verdict.update(exact=pot.exact)
    report.witnesses.update(
        primitive=_text(pot.primitive),
        residual=_text(pot.residual),
        d_primitive=_text(ext_d(pot.primitive)),
    )


def _liouville(c: _Ctx, report: Report):
    theta = c.lookup(c.positional(0, "a 1-form"), DiffForm)
    c.finish()
    x1 = liouville_field(theta)
    report.verdict.update(postcondition=True)
    report.witnesses.update(X1=_text(x1), omega=_text(-ext_d(theta)))


def _poisson(c: _Ctx, report: Report):
    f = c.lookup(c.positional(0, "a scalar"), ScalarPoly)
    g = c.lookup(c.positional(1, "a second scalar"), ScalarPoly)
    omega = c.omega()
    c.finish()
    report.witnesses["value"] = _text(poisson(omega, f, g))


HANDLERS = {
    "classify": _classify,
    "canonoid": _canonoid,
    "master": _master,
    "observable": _observable,
    "decompose": _decompose,
    "gauge": _gauge,
    "identities": _identities,
    "potential": _potential,
    "liouville": _liouville,
    "poisson": _poisson,
}


def run_command(session: Session, cmd: Command, opts: Options = None) -> Report:
    opts = opts or Options()
    report = Report(command=cmd.text, line=cmd.line)
    start = time.perf_counter()
    try:
        args = parse_args(cmd)
        HANDLERS[cmd.word](_Ctx(session, cmd, args, opts), report)
    except CanonoidError as exc:
        if isinstance(exc, ParseError) and exc.line is None:
            exc.line = cmd.line
            exc.details["line"] = cmd.line
        report.errors.append(exc.to_dict())
    except (RecursionError, ValueError, ZeroDivisionError, OverflowError) as exc:
        report.errors.append({"code": "internal_error", "message": f"{type(exc).__name__}: {exc}"})
    report.timing = round(time.perf_counter() - start, 6)
    for exp in cmd.expectations:
        report.expectations.append(check_expectation(session, report, exp))
    return report


# ---- expectations -----------------------------------------------------------

_MISSING = object()


def lookup_key(report: Report, key: str):
    if key == "error":
        return report.errors[0]["code"] if report.errors else None
    for root in (report.verdict, report.witnesses):
        node = root
        for part in key.split("."):
            if isinstance(node, dict) and part in node:
                node = node[part]
            else:
                node = _MISSING
                break
        if node is not _MISSING:
            return node
    return _MISSING


def _split_list(text: str) -> Optional[List[str]]:
    t = text.strip()
    if len(t) < 2 or (t[0], t[-1]) not in (("(", ")"), ("[", "]")):
        return None
    inner = t[1:-1]
    items, depth, cur = [], 0, ""
    for ch in inner:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            items.append(cur.strip())
            cur = ""
        else:
            cur += ch
    if cur.strip() or items:
        items.append(cur.strip())
    return items


def _same(session: Session, actual, expected: str, op: str) -> bool:
    exp = expected.strip()
    if actual is None:
        return exp.lower() in ("none", "null")
    if isinstance(actual, bool):
        return exp.lower() == str(actual).lower()
    if isinstance(actual, list):
        items = _split_list(exp)
        return items is not None and len(items) == len(actual) and all(
            _same(session, a, e, op) for a, e in zip(actual, items)
        )
    if isinstance(actual, (int, float)):
        try:
            return Fraction(actual) == Fraction(exp)
        except (ValueError, ZeroDivisionError):
            return False
    if not isinstance(actual, str):
        return False
    if op == "=" and actual.strip() == exp:
        return True
    try:
        a = session.evaluate(actual)
    except CanonoidError:
        return False
    b = session.evaluate(exp)
    if op == "~":
        if not (isinstance(a, ScalarPoly) and isinstance(b, ScalarPoly)):
            raise TypeMismatch("'~' compares scalars modulo a constant")
        return equal_mod_constant(a, b)
    if type(a) is not type(b):
        if isinstance(a, (ScalarPoly, DiffForm, VectorField)) and isinstance(b, ScalarPoly) and b.is_zero():
            return a.is_zero()
        return False
    return a == b


def check_expectation(session: Session, report: Report, exp: Expectation) -> dict:
    out = {"line": exp.line, "key": exp.key, "op": exp.op, "expected": exp.value}
    actual = lookup_key(report, exp.key)
    if actual is _MISSING:
        out.update(actual=None, ok=False, message=f"report has no key {exp.key!r}")
        return out
    out["actual"] = actual
    if exp.key == "error":
        out["ok"] = actual == exp.value
        return out
    try:
        out["ok"] = _same(session, actual, exp.value, exp.op)
    except CanonoidError as exc:
        out.update(ok=False, message=str(exc))
    return out
