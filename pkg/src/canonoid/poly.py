"""Exact multivariate polynomials over the rationals on a fixed phase space.

Coefficients are stored as Python ``int`` whenever they are integral and as
:class:`fractions.Fraction` otherwise; the two compare and hash identically,
so canonical forms are unique while integer-only computations stay on the
fast path.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterable, Mapping, Sequence, Tuple, Union

from .errors import DimensionError, SpaceMismatch

Rational = Fraction

# per-variable field width for packed exponents; degrees stay far below 2**20
_PACK_BITS = 20
Exponent = Tuple[int, ...]
Coefficient = Union[int, Fraction]


def as_rational(value) -> Coefficient:
    """Coerce ``value`` to an exact coefficient (``int`` or ``Fraction``).

    Strings such as ``"3/4"`` are accepted. Floats are rejected: every
    identity this package checks is exact.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, str):
        return as_rational(Fraction(value))
    if isinstance(value, _RationalABC):
        return as_rational(Fraction(value.numerator, value.denominator))
    raise TypeError(f"inexact or unsupported coefficient {value!r}")


_PACKERS = {}
_CACHE_LIMIT = 1 << 17


def _packer(dim):
    if dim not in _PACKERS:
        shifts = [_PACK_BITS * i for i in range(dim)]
        mask = (1 << _PACK_BITS) - 1
        cache = {}

        def pack(e):
            return sum(k << s for k, s in zip(e, shifts))

        def unpack(key):
            e = cache.get(key)
            if e is None:
                if len(cache) > _CACHE_LIMIT:
                    cache.clear()
                e = cache[key] = tuple((key >> s) & mask for s in shifts)
            return e

        _PACKERS[dim] = (pack, unpack)
    return _PACKERS[dim]


def _unpacker(dim):
    return _packer(dim)[1]


def _norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


@dataclass(frozen=True)
class PhaseSpace:
    """Coordinates ``(q_1..q_n, p_1..p_n)`` of R^2n.

    With ``n == 1`` the default names are ``q, p``; otherwise
    ``q1..qn, p1..pn``.
    """

    n: int
    names: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError(f"need n >= 1, got {self.n}")
        if not self.names:
            if self.n == 1:
                names = ("q", "p")
            else:
                names = tuple(f"q{i}" for i in range(1, self.n + 1)) + tuple(
                    f"p{i}" for i in range(1, self.n + 1)
                )
            object.__setattr__(self, "names", names)
        else:
            object.__setattr__(self, "names", tuple(self.names))
        if len(self.names) != 2 * self.n:
            raise DimensionError(
                f"{len(self.names)} coordinate names for n={self.n}", expected=2 * self.n
            )
        if len(set(self.names)) != len(self.names):
            raise DimensionError("coordinate names must be distinct")

    @property
    def dim(self) -> int:
        return 2 * self.n

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(name) from None

    def coord(self, i: Union[int, str]) -> "ScalarPoly":
        if isinstance(i, str):
            i = self.index(i)
        if not 0 <= i < self.dim:
            raise DimensionError(f"coordinate index {i} out of range")
        e = [0] * self.dim
        e[i] = 1
        return ScalarPoly._make(self, {tuple(e): 1})

    @property
    def coords(self) -> Tuple["ScalarPoly", ...]:
        return tuple(self.coord(i) for i in range(self.dim))

    def q(self, i: int = 0) -> "ScalarPoly":
        return self.coord(i)

    def p(self, i: int = 0) -> "ScalarPoly":
        return self.coord(self.n + i)

    def const(self, c) -> "ScalarPoly":
        c = as_rational(c)
        if c == 0:
            return ScalarPoly._make(self, {})
        return ScalarPoly._make(self, {(0,) * self.dim: c})

    def zero(self) -> "ScalarPoly":
        return ScalarPoly._make(self, {})

    def one(self) -> "ScalarPoly":
        return self.const(1)


def grlex_key(exps: Exponent):
    """Sort key for graded lex order with ``x_0 < x_1 < ... < x_{2n-1}``."""
    return (sum(exps), exps[::-1])


class ScalarPoly:
    """A polynomial in the phase-space coordinates with exact coefficients.

    Instances are immutable; ``terms`` maps exponent tuples to nonzero
    coefficients. Equality is equality of the term maps, which makes it
    an exact zero test.
    """

    __slots__ = ("space", "terms", "_hash", "_pack")

    def __init__(self, space: PhaseSpace, terms: Mapping[Exponent, object] = None):
        out = {}
        dim = space.dim
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != dim or any(x < 0 for x in e):
                raise DimensionError(f"bad exponent vector {e} for {dim} coordinates")
            c = as_rational(c)
            if c:
                out[e] = _norm(out.get(e, 0) + c)
                if not out[e]:
                    del out[e]
        self.space = space
        self.terms = out
        self._hash = None
        self._pack = None

    @classmethod
    def _make(cls, space, terms):
        obj = object.__new__(cls)
        obj.space = space
        obj.terms = terms
        obj._hash = None
        obj._pack = None
        return obj

    # ---- construction -------------------------------------------------

    @classmethod
    def normalize(cls, space: PhaseSpace, raw: Iterable) -> "ScalarPoly":
        """Build the canonical polynomial from ``(coefficient, exponents)`` pairs.

        Items may also be ScalarPoly values, which are summed after a
        space check. Like terms are combined and zeros dropped.
        """
        out = {}
        for item in raw:
            if isinstance(item, ScalarPoly):
                if item.space != space:
                    raise SpaceMismatch("term from a different phase space")
                pairs = ((c, e) for e, c in item.terms.items())
            else:
                c, e = item
                e = tuple(int(x) for x in e)
                if len(e) != space.dim or any(x < 0 for x in e):
                    raise DimensionError(f"bad exponent vector {e}")
                pairs = ((as_rational(c), e),)
            for c, e in pairs:
                v = out.get(e, 0) + c
                if v:
                    out[e] = _norm(v)
                else:
                    out.pop(e, None)
        return cls._make(space, out)

    def _coerce(self, other) -> "ScalarPoly":
        if isinstance(other, ScalarPoly):
            if other.space != self.space:
                raise SpaceMismatch("polynomials live on different phase spaces")
            return other
        return self.space.const(other)

    # ---- queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    @property
    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Coefficient:
        return self.terms.get((0,) * self.space.dim, 0)

    def coefficient(self, exps: Sequence[int]) -> Coefficient:
        return self.terms.get(tuple(exps), 0)

    def sorted_terms(self, descending: bool = True):
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=descending)

    def __eq__(self, other):
        if isinstance(other, ScalarPoly):
            return self.space == other.space and self.terms == other.terms
        try:
            c = as_rational(other)
        except TypeError:
            return NotImplemented
        return self.terms == ({(0,) * self.space.dim: c} if c else {})

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.space, frozenset(self.terms.items())))
        return self._hash

    # ---- ring operations ----------------------------------------------

    def __neg__(self):
        return ScalarPoly._make(self.space, {e: -c for e, c in self.terms.items()})

    def __add__(self, other):
        other = self._coerce(other)
        if not other.terms:
            return self
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = _norm(v)
            else:
                del out[e]
        return ScalarPoly._make(self.space, out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "ScalarPoly":
        c = as_rational(c)
        if not c:
            return self.space.zero()
        return ScalarPoly._make(self.space, {e: _norm(v * c) for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, ScalarPoly):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        other = self._coerce(other)
        if len(self.terms) > len(other.terms):
            self, other = other, self
        # exponents packed into one int so a monomial product is one addition
        b = other._packed()
        out = defaultdict(int)
        for ea, ca in self._packed():
            for eb, cb in b:
                out[ea + eb] += ca * cb
        unpack = _unpacker(self.space.dim)
        return ScalarPoly._make(self.space, {unpack(k): _norm(c) for k, c in out.items() if c})

    def _packed(self):
        if self._pack is None:
            pack = _packer(self.space.dim)[0]
            self._pack = [(pack(e), c) for e, c in self.terms.items()]
        return self._pack

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        """Division by a nonzero constant only."""
        if isinstance(other, ScalarPoly):
            if not other.is_constant() or other.is_zero():
                raise ZeroDivisionError("can only divide by a nonzero constant")
            other = other.constant_term()
        c = as_rational(other)
        if not c:
            raise ZeroDivisionError("division by zero")
        return self.scale(Fraction(1) / c)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = self.space.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # ---- calculus / evaluation ----------------------------------------

    def diff(self, i: int) -> "ScalarPoly":
        if not 0 <= i < self.space.dim:
            raise DimensionError(f"coordinate index {i} out of range")
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = e[:i] + (k - 1,) + e[i + 1:]
                out[e2] = c * k
        return ScalarPoly._make(self.space, out)

    def gradient(self) -> Tuple["ScalarPoly", ...]:
        return tuple(self.diff(i) for i in range(self.space.dim))

    def __call__(self, *point):
        return self.eval(point)

    def eval(self, point: Sequence) -> Coefficient:
        if len(point) != self.space.dim:
            raise DimensionError(
                f"point has {len(point)} entries, expected {self.space.dim}"
            )
        x = [as_rational(v) for v in point]
        total = 0
        for e, c in self.terms.items():
            v = c
            for xi, k in zip(x, e):
                if k:
                    v = v * xi ** k
            total += v
        return _norm(total)

    def compose(self, subs: Sequence["ScalarPoly"]) -> "ScalarPoly":
        """Substitute polynomials for the coordinates.

        ``subs[i]`` replaces coordinate ``i``; the result lives in the space
        of the substituted polynomials.
        """
        if len(subs) != self.space.dim:
            raise DimensionError("substitution list has the wrong length")
        target = subs[0].space
        if any(s.space != target for s in subs):
            raise SpaceMismatch("substitutions from different spaces")
        cache = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                cache[key] = subs[i] if k == 1 else power(i, k - 1) * subs[i]
            return cache[key]

        result = target.zero()
        for e, c in self.terms.items():
            term = target.const(c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    # ---- printing -----------------------------------------------------

    def monomial_str(self, e: Exponent) -> str:
        parts = []
        for name, k in zip(self.space.names, e):
            if k == 1:
                parts.append(name)
            elif k > 1:
                parts.append(f"{name}^{k}")
        return "*".join(parts)

    def __str__(self):
        if not self.terms:
            return "0"
        chunks = []
        for e, c in self.sorted_terms():
            mono = self.monomial_str(e)
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            chunks.append((sign, body))
        first_sign, first = chunks[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in chunks[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"ScalarPoly({self})"

    def needs_parens(self) -> bool:
        return len(self.terms) > 1


def poly_normalize(space: PhaseSpace, raw: Iterable) -> ScalarPoly:
    return ScalarPoly.normalize(space, raw)


def poly_diff(f: ScalarPoly, coord: int) -> ScalarPoly:
    return f.diff(coord)


def poly_eval(f: ScalarPoly, point: Sequence) -> Coefficient:
    return f.eval(point)


def poly_equal(f: ScalarPoly, g: ScalarPoly) -> bool:
    if f.space != g.space:
        raise SpaceMismatch("polynomials live on different phase spaces")
    return f.terms == g.terms


def equal_mod_constant(f: ScalarPoly, g: ScalarPoly) -> bool:
    """True when ``f - g`` is a constant."""
    return (f - g).is_constant()


def monomials_up_to(space: PhaseSpace, degree: int, include_constant: bool = True):
    """All exponent vectors of total degree <= ``degree``, ascending graded lex."""
    out = []

    def rec(prefix, remaining, slots):
        if slots == 0:
            out.append(tuple(prefix))
            return
        for k in range(remaining + 1):
            rec(prefix + [k], remaining - k, slots - 1)

    rec([], degree, space.dim)
    if not include_constant:
        out = [e for e in out if any(e)]
    return sorted(out, key=grlex_key)
