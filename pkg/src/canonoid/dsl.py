"""Line-oriented session language.

A session declares one phase space and then binds named objects::

    space n=1 coords q,p
    scalar H = 1/2*p^2
    field G = p d/dq
    form th = p dq
    map M = (2*q, p) inverse (1/2*q, p)
    omega W = dq^dp

Any other line starting with a known command word is kept as a command for
``commands.run_command``; ``expect`` lines attach checks to the command
before them. ``#`` starts a comment.

Expressions are typed: scalars, vector fields and forms. ``^`` binds
tightest (power for scalars, wedge for forms), then unary minus, then
``*`` and ``/``, then ``+`` and ``-``. Juxtaposition multiplies only in
front of ``d/dx`` or ``dx``, so ``p d/dq`` and ``(p + q) dq^dp`` read as
expected while ``2 q`` is a syntax error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .errors import (
    CanonoidError,
    LimitExceeded,
    NotSymplectic,
    ParseDimensionError,
    ParseError,
    TypeMismatch,
    UnknownIdentifier,
    UsageError,
)
from .forms import DiffForm, PolyMap, VectorField, ext_d, wedge
from .poly import PhaseSpace, ScalarPoly
from .symplectic import SymplecticForm, validate_symplectic

MAX_NESTING = 64
MAX_EXPONENT = 64
MAX_DEGREE = 256
MAX_DIM = 16
MAX_COEFF_BITS = 4096

COMMANDS = (
    "classify", "canonoid", "master", "observable", "decompose", "gauge",
    "identities", "potential", "liouville", "poisson",
)
DEFINITIONS = ("space", "scalar", "field", "form", "map", "omega")
RESERVED = frozenset(COMMANDS + DEFINITIONS + ("expect", "wrt", "inverse", "coords"))

KIND = {
    ScalarPoly: "scalar",
    VectorField: "field",
    DiffForm: "form",
    PolyMap: "map",
    SymplecticForm: "omega",
}


def kind_of(obj) -> str:
    return KIND.get(type(obj), type(obj).__name__)


@dataclass(frozen=True)
class Token:
    kind: str  # NUM IDENT DERIV OP END
    text: str
    col: int


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<NUM>\d+)|(?P<DERIV>d/d[A-Za-z_]\w*)|(?P<IDENT>[A-Za-z_]\w*)"
    r"|(?P<OP>[-+*/^(),=~.]))"
)


def tokenize(text: str, line: Optional[int] = None) -> List[Token]:
    tokens = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos] in " \t\r\n\f\v":
            pos += 1
        if pos >= n:
            break
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos + 1)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append(Token(kind, m.group(kind), start + 1))
        pos = m.end()
    tokens.append(Token("END", "", n + 1))
    return tokens


class _Parser:
    """Recursive-descent evaluator over one token list."""

    def __init__(self, session: "Session", tokens: List[Token], line: Optional[int]):
        self.s = session
        self.toks = tokens
        self.i = 0
        self.line = line
        self.depth = 0

    # ---- token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "END":
            self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.tok.kind == "OP" and self.tok.text == text:
            self.advance()
            return True
        return False

    def expect(self, text: str) -> Token:
        if not (self.tok.kind == "OP" and self.tok.text == text):
            raise self.error(f"expected {text!r}")
        return self.advance()

    def error(self, msg, cls=ParseError, tok=None):
        tok = tok or self.tok
        found = tok.text or "end of line"
        if cls is ParseError:
            msg = f"{msg}, found {found!r}"
        return cls(msg, self.line, tok.col)

    def at_end(self) -> bool:
        return self.tok.kind == "END"

    def ident(self, what="a name") -> Token:
        if self.tok.kind != "IDENT":
            raise self.error(f"expected {what}")
        return self.advance()

    def integer(self, what="an integer") -> int:
        if self.tok.kind != "NUM":
            raise self.error(f"expected {what}")
        return int(self.advance().text)

    # ---- expressions

    def expression(self):
        self.depth += 1
        if self.depth > MAX_NESTING:
            raise self.error("expression nested too deeply", LimitExceeded)
        try:
            value = self.term()
            while self.tok.kind == "OP" and self.tok.text in "+-":
                op = self.advance()
                rhs = self.term()
                value = self.binary(op, value, rhs)
            return value
        finally:
            self.depth -= 1

    def starts_differential(self) -> bool:
        t = self.tok
        if t.kind == "DERIV":
            return True
        return t.kind == "IDENT" and self.s.is_differential(t.text)

    def term(self):
        value = self.unary()
        while True:
            if self.tok.kind == "OP" and self.tok.text in "*/":
                op = self.advance()
                rhs = self.unary()
                value = self.binary(op, value, rhs)
            elif self.starts_differential():
                op = Token("OP", "*", self.tok.col)
                rhs = self.unary()
                value = self.binary(op, value, rhs)
            else:
                return value

    def unary(self):
        if self.tok.kind == "OP" and self.tok.text in "+-":
            op = self.advance()
            self.depth += 1
            if self.depth > MAX_NESTING:
                raise self.error("expression nested too deeply", LimitExceeded)
            try:
                value = self.unary()
            finally:
                self.depth -= 1
            return -value if op.text == "-" else value
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok.kind == "OP" and self.tok.text == "^":
            op = self.advance()
            self.depth += 1
            if self.depth > MAX_NESTING:
                raise self.error("expression nested too deeply", LimitExceeded)
            try:
                exponent_tok = self.tok
                exponent = self.power()
            finally:
                self.depth -= 1
            return self.binary(op, base, exponent, exponent_tok)
        return base

    def atom(self):
        t = self.tok
        if t.kind == "NUM":
            self.advance()
            if len(t.text) > 60:
                raise self.error("integer literal too long", LimitExceeded, t)
            return self.s.space.const(int(t.text))
        if t.kind == "DERIV":
            self.advance()
            coord = t.text[3:]
            if coord not in self.s.space.names:
                raise UnknownIdentifier(f"no coordinate {coord!r} in {t.text!r}", self.line, t.col)
            return VectorField.basis(self.s.space, coord)
        if t.kind == "IDENT":
            self.advance()
            return self.s.resolve(t.text, self.line, t.col)
        if self.accept("("):
            value = self.expression()
            self.expect(")")
            return value
        raise self.error("expected a number, name or '('")

    def binary(self, op: Token, a, b, rhs_tok: Token = None):
        mismatch = TypeMismatch(
            f"cannot apply {op.text!r} to {kind_of(a)} and {kind_of(b)}", self.line, op.col
        )
        for x in (a, b):
            if not isinstance(x, (ScalarPoly, VectorField, DiffForm)):
                raise mismatch
        text = op.text
        if text in "+-":
            if type(a) is not type(b):
                if isinstance(a, DiffForm) and isinstance(b, ScalarPoly) and b.is_zero():
                    return a
                if isinstance(b, DiffForm) and isinstance(a, ScalarPoly) and a.is_zero():
                    return b if text == "+" else -b
                raise mismatch
            if isinstance(a, DiffForm) and a.degree != b.degree:
                raise ParseDimensionError(
                    f"cannot add forms of degree {a.degree} and {b.degree}", self.line, op.col
                )
            return a + b if text == "+" else a - b
        if text == "*":
            if isinstance(a, ScalarPoly) and isinstance(b, ScalarPoly):
                return self.bounded(a * b, op)
            if isinstance(a, ScalarPoly):
                a, b = b, a
            if isinstance(b, ScalarPoly) and not isinstance(a, ScalarPoly):
                return a * b
            raise mismatch
        if text == "/":
            if not isinstance(b, ScalarPoly):
                raise mismatch
            if not b.is_constant():
                raise TypeMismatch("can only divide by a constant", self.line, op.col)
            if b.is_zero():
                raise ParseError("division by zero", self.line, op.col)
            return a / b.constant_term()
        if text == "^":
            if isinstance(a, DiffForm) or isinstance(b, DiffForm):
                if isinstance(a, VectorField) or isinstance(b, VectorField):
                    raise mismatch
                result = wedge(a, b)
                if result.degree > a.space.dim:
                    raise ParseDimensionError(
                        f"wedge of degree {result.degree} exceeds dimension {a.space.dim}",
                        self.line, op.col,
                    )
                return result
            if isinstance(a, ScalarPoly) and isinstance(b, ScalarPoly):
                tok = rhs_tok or op
                if not b.is_constant() or b.constant_term() != int(b.constant_term()) or b.constant_term() < 0:
                    raise TypeMismatch("exponent must be a non-negative integer", self.line, tok.col)
                k = int(b.constant_term())
                if k > MAX_EXPONENT:
                    raise LimitExceeded(f"exponent exceeds {MAX_EXPONENT}", self.line, tok.col)
                if a.degree * k > MAX_DEGREE:
                    raise LimitExceeded(f"degree would exceed {MAX_DEGREE}", self.line, tok.col)
                return self.bounded(a ** k, tok)
            raise mismatch
        raise mismatch

    def bounded(self, value: ScalarPoly, op: Token):
        if value.degree > MAX_DEGREE:
            raise LimitExceeded(f"degree would exceed {MAX_DEGREE}", self.line, op.col)
        for c in value.terms.values():
            c = Fraction(c)
            if max(c.numerator.bit_length(), c.denominator.bit_length()) > MAX_COEFF_BITS:
                raise LimitExceeded("coefficient too large", self.line, op.col)
        return value

    def full_expression(self):
        value = self.expression()
        if not self.at_end() and not (self.tok.kind == "OP" and self.tok.text in ",)"):
            raise self.error("unexpected token")
        return value

    def tuple_expr(self) -> List[ScalarPoly]:
        open_tok = self.expect("(")
        items = [self.expression()]
        while self.accept(","):
            items.append(self.expression())
        self.expect(")")
        for x in items:
            if not isinstance(x, ScalarPoly):
                raise TypeMismatch(f"map components must be scalars, got {kind_of(x)}", self.line, open_tok.col)
        return items


@dataclass
class Command:
    line: int
    text: str
    word: str
    tokens: List[Token]
    expectations: List["Expectation"] = field(default_factory=list)


@dataclass(frozen=True)
class Expectation:
    line: int
    key: str
    op: str  # "=" exact, "~" modulo an additive constant
    value: str


_EXPECT_RE = re.compile(r"expect\s+([A-Za-z_][\w.]*)\s*([=~])\s*(.*?)\s*$")


class Session:
    """Bindings plus the commands collected from a session text."""

    def __init__(self, space: Optional[PhaseSpace] = None):
        self.space = space
        self.bindings: Dict[str, object] = {}
        self.commands: List[Command] = []

    # ---- name resolution

    def resolve(self, name: str, line=None, col=None):
        if self.space is None:
            raise UsageError("declare a space first", line, col)
        if name in self.space.names:
            return self.space.coord(name)
        if name in self.bindings:
            obj = self.bindings[name]
            if isinstance(obj, SymplecticForm):
                return obj.form
            return obj
        if name.startswith("d"):
            rest = name[1:]
            if rest in self.space.names:
                return DiffForm.dx(self.space, rest)
            if isinstance(self.bindings.get(rest), ScalarPoly):
                return ext_d(self.bindings[rest])
        raise UnknownIdentifier(f"unknown identifier {name!r}", line, col)

    def is_differential(self, name: str) -> bool:
        if self.space is None or name in self.space.names or name in self.bindings:
            return False
        rest = name[1:]
        return name.startswith("d") and (
            rest in self.space.names or isinstance(self.bindings.get(rest), ScalarPoly)
        )

    def evaluate(self, text: str, line: Optional[int] = None):
        """Evaluate a standalone expression in this session."""
        p = _Parser(self, tokenize(text, line), line)
        value = p.expression()
        if not p.at_end():
            raise p.error("unexpected token")
        return value

    # ---- statements

    def feed(self, raw: str, line: int = None) -> Optional[Command]:
        """Process one line; return a Command for command lines."""
        text = raw.split("#", 1)[0].strip()
        if not text:
            return None
        word = text.split(None, 1)[0]
        if word == "expect":
            return self._expect(text, line)
        tokens = tokenize(text, line)
        head = tokens[0]
        if head.kind != "IDENT":
            raise ParseError(f"expected a statement keyword, found {head.text!r}", line, head.col)
        if head.text in COMMANDS:
            if self.space is None:
                raise UsageError("declare a space first", line, head.col)
            cmd = Command(line, text, head.text, tokens)
            self.commands.append(cmd)
            return cmd
        if head.text not in DEFINITIONS:
            raise ParseError(f"unknown statement {head.text!r}", line, head.col)
        p = _Parser(self, tokens, line)
        p.advance()
        if head.text == "space":
            space = self._space(p)
        elif self.space is None:
            raise UsageError("declare a space first", line, head.col)
        else:
            name, value = getattr(self, "_" + head.text)(p)
        if not p.at_end():
            raise p.error("unexpected token")
        # bind only once the whole line parsed
        if head.text == "space":
            self.space = space
        else:
            self.bindings[name] = value
        return None

    def _expect(self, text, line):
        m = _EXPECT_RE.fullmatch(text)
        if not m or not m.group(3):
            raise ParseError("expected 'expect <key> = <value>' or 'expect <key> ~ <value>'", line, 1)
        if not self.commands:
            raise UsageError("expect must follow a command", line, 1)
        exp = Expectation(line, m.group(1), m.group(2), m.group(3))
        self.commands[-1].expectations.append(exp)
        return None

    def _space(self, p: _Parser):
        if self.space is not None:
            raise UsageError("space already declared", p.line, p.toks[0].col)
        key = p.ident("'n'")
        if key.text != "n":
            raise p.error("expected 'n'", tok=key)
        p.expect("=")
        num_tok = p.tok
        n = p.integer("the number of degrees of freedom")
        if n < 1 or n > MAX_DIM:
            raise ParseDimensionError(f"n must be between 1 and {MAX_DIM}", p.line, num_tok.col)
        names: Tuple[str, ...] = ()
        if p.tok.kind == "IDENT" and p.tok.text == "coords":
            p.advance()
            first = p.tok
            found = [p.ident("a coordinate name").text]
            while p.accept(","):
                found.append(p.ident("a coordinate name").text)
            if len(found) != 2 * n:
                raise ParseDimensionError(
                    f"space n={n} needs {2 * n} coordinate names, got {len(found)}", p.line, first.col
                )
            if len(set(found)) != len(found):
                raise ParseError("coordinate names must be distinct", p.line, first.col)
            bad = [x for x in found if x in RESERVED or x.startswith("d")]
            if bad:
                raise ParseError(f"{bad[0]!r} cannot be a coordinate name", p.line, first.col)
            names = tuple(found)
        return PhaseSpace(n, names)

    def _binding_name(self, p: _Parser) -> Token:
        tok = p.ident("a binding name")
        name = tok.text
        if name in RESERVED:
            raise ParseError(f"{name!r} is a reserved word", p.line, tok.col)
        if name in self.space.names or self.is_differential(name):
            raise ParseError(f"{name!r} clashes with a coordinate or differential", p.line, tok.col)
        if name in self.bindings:
            raise UsageError(f"{name!r} is already bound", p.line, tok.col)
        p.expect("=")
        return tok

    def _typed(self, p: _Parser, want):
        start = p.tok
        value = p.expression()
        if not isinstance(value, want):
            raise TypeMismatch(f"expected a {KIND[want]}, got a {kind_of(value)}", p.line, start.col)
        return value

    def _scalar(self, p):
        tok = self._binding_name(p)
        return tok.text, self._typed(p, ScalarPoly)

    def _field(self, p):
        tok = self._binding_name(p)
        value = p.expression()
        if isinstance(value, ScalarPoly) and value.is_zero():
            value = VectorField.zero(self.space)
        if not isinstance(value, VectorField):
            raise TypeMismatch(f"expected a field, got a {kind_of(value)}", p.line, tok.col)
        return tok.text, value

    def _form(self, p):
        tok = self._binding_name(p)
        start = p.tok
        value = p.expression()
        if isinstance(value, ScalarPoly):
            raise TypeMismatch("a form needs at least one differential; use 'scalar' for functions",
                               p.line, start.col)
        if not isinstance(value, DiffForm):
            raise TypeMismatch(f"expected a form, got a {kind_of(value)}", p.line, start.col)
        return tok.text, value

    def _map(self, p):
        tok = self._binding_name(p)
        fwd = p.tuple_expr()
        kw = p.ident("'inverse'")
        if kw.text != "inverse":
            raise p.error("expected 'inverse'", tok=kw)
        inv_tok = p.tok
        inv = p.tuple_expr()
        dim = self.space.dim
        if len(fwd) != dim or len(inv) != dim:
            raise ParseDimensionError(
                f"map needs {dim} components each way, got {len(fwd)} and {len(inv)}", p.line, inv_tok.col
            )
        return tok.text, PolyMap(self.space, fwd, inv)

    def _omega(self, p):
        tok = self._binding_name(p)
        start = p.tok
        value = p.expression()
        if not isinstance(value, DiffForm) or value.degree != 2:
            raise TypeMismatch("omega must be a 2-form", p.line, start.col)
        sf = validate_symplectic(value)
        if not sf.closed:
            raise NotSymplectic("omega is not closed", p.line, start.col)
        if not sf.nondegenerate:
            raise NotSymplectic("omega is degenerate", p.line, start.col)
        return tok.text, sf

    def describe(self) -> Dict[str, str]:
        out = {}
        for name, obj in self.bindings.items():
            out[name] = f"{kind_of(obj)} {canonical_text(obj)}"
        return out


def canonical_text(obj) -> str:
    """Text that re-parses to ``obj`` in its session."""
    if isinstance(obj, SymplecticForm):
        return str(obj.form)
    return str(obj)


def definition_line(name: str, obj) -> str:
    return f"{kind_of(obj)} {name} = {canonical_text(obj)}"


def parse_session(text: str) -> Session:
    """Parse a whole session, raising on the first error."""
    session = Session()
    for lineno, raw in enumerate(text.splitlines(), 1):
        session.feed(raw, lineno)
    return session


def safe_feed(session: Session, raw: str, line: int):
    """``feed`` that converts any unexpected exception into a ParseError."""
    try:
        return session.feed(raw, line), None
    except CanonoidError as exc:
        if exc.details.get("line") is None:
            exc.details["line"] = line
            if isinstance(exc, ParseError):
                exc.line = line
        return None, exc
    except (RecursionError, ValueError, ZeroDivisionError, OverflowError, MemoryError) as exc:
        return None, ParseError(f"{type(exc).__name__}: {exc}", line, 1)
