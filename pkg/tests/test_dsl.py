from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from canonoid import randgen as rg
from canonoid.dsl import Session, definition_line, parse_session, safe_feed, tokenize
from canonoid.errors import (
    CanonoidError,
    LimitExceeded,
    NotInvertible,
    NotSymplectic,
    ParseDimensionError,
    ParseError,
    TypeMismatch,
    UnknownIdentifier,
    UsageError,
)
from canonoid.forms import DiffForm, PolyMap, VectorField
from canonoid.poly import PhaseSpace
from canonoid.symplectic import SymplecticForm

from conftest import S1, S2, seeded

q, p = S1.coords
HEADER = "space n=1 coords q,p\n"


def sess(body=""):
    return parse_session(HEADER + body)


def test_space_and_field():
    s = sess("field G = p d/dq")
    assert s.space == S1
    assert s.bindings["G"] == VectorField.basis(S1, 0) * p


def test_scalar_rational():
    assert sess("scalar H = 1/2*p^2").bindings["H"] == p ** 2 / 2


def test_form_and_map():
    s = sess("form th = p dq\nmap M = (2*q, p) inverse (1/2*q, p)")
    assert s.bindings["th"] == DiffForm.dx(S1, 0) * p
    M = s.bindings["M"]
    assert isinstance(M, PolyMap) and M.forward == (2 * q, p)


def test_omega_binding():
    s = sess("form w = 2 dq^dp\nomega W = w")
    assert isinstance(s.bindings["W"], SymplecticForm)


def test_default_coordinate_names():
    s = parse_session("space n=2\nscalar f = q1*p2 - q2")
    assert s.space == S2


@pytest.mark.parametrize(
    "expr, expected",
    [
        ("-p^2", -p ** 2),
        ("-1/2*p^2", -p ** 2 / 2),
        ("2*q + 3*p", 2 * q + 3 * p),
        ("(q + p)^2", (q + p) ** 2),
        ("q - p - 1", q - p - 1),
        ("q/2/3", q / 6),
        ("2^3^2", S1.const(2 ** 9)),
        ("-(q - p)", p - q),
        ("+q", q),
    ],
)
def test_precedence(expr, expected):
    assert sess().evaluate(expr) == expected


def test_implicit_product_only_before_differentials():
    s = sess("scalar H = q")
    assert s.evaluate("(p + q) dq^dp") == (DiffForm.dx(S1, 0) ^ DiffForm.dx(S1, 1)) * (p + q)
    assert s.evaluate("q^2 d/dp") == VectorField.basis(S1, 1) * q ** 2
    assert s.evaluate("p dH") == DiffForm.dx(S1, 0) * p
    with pytest.raises(ParseError):
        s.evaluate("2 q")


def test_zero_forms_and_fields():
    s = sess("form z = 0 dq\nfield Z = 0")
    assert s.bindings["z"] == DiffForm.zero(S1, 1)
    assert s.bindings["Z"] == VectorField.zero(S1)


def _code(text):
    s = Session()
    for i, line in enumerate(text.splitlines(), 1):
        _, err = safe_feed(s, line, i)
        if err is not None:
            return err
    return None


@pytest.mark.parametrize(
    "body, cls, line, col",
    [
        ("scalar X = 2 q", ParseError, 2, 14),
        ("scalar X = y", UnknownIdentifier, 2, 12),
        ("field X = d/dz", UnknownIdentifier, 2, 11),
        ("scalar X = dq", TypeMismatch, 2, 12),
        ("form X = dq + q", TypeMismatch, 2, 13),
        ("form X = dq + dq^dp", ParseDimensionError, 2, 13),
        ("map M = (q) inverse (q)", ParseDimensionError, 2, 21),
        ("scalar X = q^99", LimitExceeded, 2, 14),
        ("omega W = q dq^dp", NotSymplectic, 2, 11),
        ("scalar q = 1", ParseError, 2, 8),
        ("scalar H = 1\nscalar H = 2", UsageError, 3, 8),
        ("space n=2", UsageError, 2, 1),
        ("@", ParseError, 2, 1),
    ],
)
def test_error_codes_and_positions(body, cls, line, col):
    err = _code(HEADER + body)
    assert type(err) is cls
    assert err.line == line and err.column == col
    assert err.to_dict()["code"] == cls.code


def test_space_dimension_mismatch():
    err = _code("space n=2 coords a,b,c")
    assert isinstance(err, ParseDimensionError)


def test_not_invertible_map_reports_line():
    err = _code(HEADER + "map M = (q^2, p) inverse (q, p)")
    assert isinstance(err, NotInvertible) and err.to_dict()["line"] == 2


def test_error_codes_are_distinct():
    classes = [ParseError, UnknownIdentifier, TypeMismatch, ParseDimensionError,
               UsageError, LimitExceeded, NotSymplectic]
    codes = [c.code for c in classes]
    assert len(set(codes)) == len(codes)


def test_failed_line_binds_nothing():
    s = Session()
    safe_feed(s, "space n=1", 1)
    safe_feed(s, "scalar X = 2 q", 2)
    assert "X" not in s.bindings


def test_requires_space_first():
    assert isinstance(_code("scalar H = p"), UsageError)


def test_comments_and_blank_lines():
    s = sess("# comment\n\n  scalar H = p  # trailing\n")
    assert s.bindings["H"] == p


def test_commands_and_expectations_collected():
    s = sess("field G = p d/dq\nmaster G wrt G\nexpect degree = 0\nexpect chain = (p d/dq, 0)")
    (cmd,) = s.commands
    assert cmd.word == "master"
    assert [e.key for e in cmd.expectations] == ["degree", "chain"]


def test_tokenize_columns():
    toks = tokenize("p d/dq + 12")
    assert [(t.kind, t.col) for t in toks] == [("IDENT", 1), ("DERIV", 3), ("OP", 8), ("NUM", 10), ("END", 12)]


# ---- round trip ------------------------------------------------------------

def _roundtrip(space, name, obj):
    header = f"space n={space.n} coords {','.join(space.names)}\n"
    s = parse_session(header + definition_line(name, obj))
    back = s.bindings[name]
    if isinstance(obj, SymplecticForm):
        return back.form == obj.form
    return back == obj


@pytest.mark.parametrize("seed", range(30))
def test_round_trip_random_objects(seed):
    r = seeded(seed)
    space = S1 if seed % 2 else S2
    objs = {
        "f": rg.random_poly(r, space) / r.choice((1, 2, 3, 7)),
        "X": rg.random_field(r, space),
        "a": rg.random_form(r, space, r.randint(1, space.dim)),
        "M": rg.random_map(r, space),
    }
    for name, obj in objs.items():
        assert _roundtrip(space, name, obj), (name, str(obj))


def test_round_trip_custom_names_and_zero_forms():
    space = PhaseSpace(1, ("x", "y"))
    assert _roundtrip(space, "z", DiffForm.zero(space, 2))
    assert _roundtrip(space, "X", VectorField.basis(space, 1) * space.coord(0) ** 2)
    assert _roundtrip(space, "f", space.const(Fraction(-7, 3)))


# ---- fuzz ------------------------------------------------------------------

PRELUDE = HEADER + "field G = p d/dq\nscalar H = 1/2*p^2\nform A = p dq\n"


@settings(max_examples=300)
@given(st.text(alphabet=st.characters(min_codepoint=0, max_codepoint=127), max_size=60))
def test_fuzz_never_crashes(line):
    s = parse_session(PRELUDE)
    try:
        s.feed(line, 5)
    except CanonoidError as exc:
        d = exc.to_dict()
        assert isinstance(d["code"], str) and d["code"]
