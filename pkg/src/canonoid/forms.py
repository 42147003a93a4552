"""Vector fields, differential forms and the Cartan calculus on R^2n.

Forms are stored on strictly increasing index tuples. A k-form with
``k > 2n`` is always zero but is still representable, so that operator
compositions never need to special-case the top degree.
"""

from __future__ import annotations

from typing import Dict, Mapping, Sequence, Tuple, Union

from .errors import ContractScalar, DimensionError, NotInvertible, SpaceMismatch, WrongDegree
from .poly import PhaseSpace, ScalarPoly

Index = Tuple[int, ...]


def _check_space(a, b):
    if a.space != b.space:
        raise SpaceMismatch("objects live on different phase spaces")


def _sort_with_sign(idx: Sequence[int]):
    """Sort an index sequence, returning ``(sign, sorted_tuple)``.

    ``sign`` is 0 when an index repeats.
    """
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    # insertion sort; counts transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(idx)


class VectorField:
    """One polynomial component per coordinate."""

    __slots__ = ("space", "components")

    def __init__(self, space: PhaseSpace, components: Sequence):
        comps = tuple(c if isinstance(c, ScalarPoly) else space.const(c) for c in components)
        if len(comps) != space.dim:
            raise DimensionError(
                f"vector field needs {space.dim} components, got {len(comps)}"
            )
        for c in comps:
            if c.space != space:
                raise SpaceMismatch("component from a different phase space")
        self.space = space
        self.components = comps

    @classmethod
    def zero(cls, space: PhaseSpace) -> "VectorField":
        return cls(space, [space.zero()] * space.dim)

    @classmethod
    def basis(cls, space: PhaseSpace, i: Union[int, str]) -> "VectorField":
        """The coordinate field d/dx_i."""
        if isinstance(i, str):
            i = space.index(i)
        comps = [space.zero()] * space.dim
        comps[i] = space.one()
        return cls(space, comps)

    @classmethod
    def euler(cls, space: PhaseSpace) -> "VectorField":
        return cls(space, space.coords)

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.space == other.space and self.components == other.components

    def __hash__(self):
        return hash((self.space, self.components))

    def __add__(self, other):
        _check_space(self, other)
        return VectorField(self.space, [a + b for a, b in zip(self, other)])

    def __sub__(self, other):
        _check_space(self, other)
        return VectorField(self.space, [a - b for a, b in zip(self, other)])

    def __neg__(self):
        return VectorField(self.space, [-a for a in self])

    def __mul__(self, f):
        """Multiply by a scalar polynomial or a rational constant."""
        return VectorField(self.space, [a * f for a in self])

    __rmul__ = __mul__

    def __truediv__(self, c):
        return VectorField(self.space, [a / c for a in self])

    def __call__(self, f: ScalarPoly) -> ScalarPoly:
        """Directional derivative ``X(f)``."""
        _check_space(self, f)
        out = self.space.zero()
        for i, c in enumerate(self.components):
            if c:
                d = f.diff(i)
                if d:
                    out = out + c * d
        return out

    @property
    def degree(self) -> int:
        return max(c.degree for c in self.components)

    def __str__(self):
        parts = []
        for name, c in zip(self.space.names, self.components):
            if c:
                parts.append(_coef_str(c) + f"d/d{name}")
        return _join_terms(parts) if parts else "0"

    def __repr__(self):
        return f"VectorField({self})"


def _coef_str(c: ScalarPoly) -> str:
    """Printed coefficient followed by a trailing space, or '' / '-' for +-1."""
    if c == 1:
        return ""
    if c == -1:
        return "-"
    if c.needs_parens():
        return f"({c}) "
    return f"{c} "


def _join_terms(parts):
    out = parts[0]
    for p in parts[1:]:
        if p.startswith("-"):
            out += " - " + p[1:]
        else:
            out += " + " + p
    return out


class DiffForm:
    """A k-form with polynomial coefficients on increasing index tuples."""

    __slots__ = ("space", "degree", "coeffs")

    def __init__(self, space: PhaseSpace, degree: int, coeffs: Mapping = None):
        if degree < 0:
            raise WrongDegree(f"negative degree {degree}")
        out: Dict[Index, ScalarPoly] = {}
        for idx, c in (coeffs or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise WrongDegree(f"index {idx} does not match degree {degree}")
            if any(not 0 <= i < space.dim for i in idx):
                raise DimensionError(f"index {idx} out of range")
            if not isinstance(c, ScalarPoly):
                c = space.const(c)
            elif c.space != space:
                raise SpaceMismatch("coefficient from a different phase space")
            sign, key = _sort_with_sign(idx)
            if not sign or not c:
                continue
            v = out.get(key, space.zero()) + (c if sign > 0 else -c)
            if v:
                out[key] = v
            else:
                out.pop(key, None)
        self.space = space
        self.degree = degree
        self.coeffs = out

    @classmethod
    def _make(cls, space, degree, coeffs):
        obj = object.__new__(cls)
        obj.space = space
        obj.degree = degree
        obj.coeffs = coeffs
        return obj

    @classmethod
    def zero(cls, space: PhaseSpace, degree: int) -> "DiffForm":
        return cls._make(space, degree, {})

    @classmethod
    def scalar(cls, f: ScalarPoly) -> "DiffForm":
        return cls._make(f.space, 0, {(): f} if f else {})

    @classmethod
    def dx(cls, space: PhaseSpace, i: Union[int, str]) -> "DiffForm":
        if isinstance(i, str):
            i = space.index(i)
        return cls._make(space, 1, {(i,): space.one()})

    @classmethod
    def from_components(cls, space: PhaseSpace, comps: Sequence) -> "DiffForm":
        """1-form ``sum comps[i] dx_i``."""
        if len(comps) != space.dim:
            raise DimensionError("need one component per coordinate")
        return cls(space, 1, {(i,): c for i, c in enumerate(comps)})

    def component(self, idx: Index) -> ScalarPoly:
        return self.coeffs.get(tuple(idx), self.space.zero())

    def components(self) -> Tuple[ScalarPoly, ...]:
        """Coefficient list of a 1-form."""
        if self.degree != 1:
            raise WrongDegree("components() is for 1-forms")
        return tuple(self.component((i,)) for i in range(self.space.dim))

    @property
    def scalar_part(self) -> ScalarPoly:
        if self.degree != 0:
            raise WrongDegree("not a 0-form")
        return self.coeffs.get((), self.space.zero())

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, DiffForm):
            if self.degree == 0 and isinstance(other, ScalarPoly):
                return self.scalar_part == other
            if other == 0:
                return not self.coeffs
            return NotImplemented
        return (
            self.space == other.space
            and self.degree == other.degree
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.space, self.degree, frozenset(self.coeffs.items())))

    def _same(self, other):
        _check_space(self, other)
        if self.degree != other.degree:
            raise WrongDegree(f"cannot add a {self.degree}-form and a {other.degree}-form")

    def __add__(self, other):
        self._same(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            v = out[k] + c if k in out else c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return DiffForm._make(self.space, self.degree, out)

    def __neg__(self):
        return DiffForm._make(self.space, self.degree, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, f):
        """Multiply by a function or rational constant."""
        if isinstance(f, DiffForm):
            return NotImplemented
        out = {}
        for k, c in self.coeffs.items():
            v = c * f
            if v:
                out[k] = v
        return DiffForm._make(self.space, self.degree, out)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return DiffForm._make(self.space, self.degree, {k: v / c for k, v in self.coeffs.items()})

    def __xor__(self, other):
        return wedge(self, other)

    def __str__(self):
        if self.degree == 0:
            return str(self.scalar_part)
        names = self.space.names
        if not self.coeffs:
            return "0 " + "^".join(f"d{names[i]}" for i in range(self.degree))
        parts = []
        for idx in sorted(self.coeffs):
            basis = "^".join(f"d{names[i]}" for i in idx)
            parts.append(_coef_str(self.coeffs[idx]) + basis)
        return _join_terms(parts)

    def __repr__(self):
        return f"DiffForm[{self.degree}]({self})"


def as_form(x) -> DiffForm:
    return DiffForm.scalar(x) if isinstance(x, ScalarPoly) else x


# ---- exterior algebra -------------------------------------------------------


def wedge(a: DiffForm, b: DiffForm) -> DiffForm:
    a, b = as_form(a), as_form(b)
    _check_space(a, b)
    deg = a.degree + b.degree
    out: Dict[Index, ScalarPoly] = {}
    for ia, ca in a.coeffs.items():
        for ib, cb in b.coeffs.items():
            sign, key = _sort_with_sign(ia + ib)
            if not sign:
                continue
            v = ca * cb
            if sign < 0:
                v = -v
            if key in out:
                v = out[key] + v
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return DiffForm._make(a.space, deg, out)


def ext_d(a) -> DiffForm:
    """Exterior derivative."""
    a = as_form(a)
    space = a.space
    out: Dict[Index, ScalarPoly] = {}
    for idx, c in a.coeffs.items():
        for j in range(space.dim):
            if j in idx:
                continue
            dc = c.diff(j)
            if not dc:
                continue
            pos = sum(1 for i in idx if i < j)
            key = idx[:pos] + (j,) + idx[pos:]
            if pos % 2:
                dc = -dc
            v = out[key] + dc if key in out else dc
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return DiffForm._make(space, a.degree + 1, out)


def interior_prod(X: VectorField, a: DiffForm) -> DiffForm:
    """Contraction ``i(X)a``; contracting a 0-form is an error."""
    a = as_form(a)
    _check_space(X, a)
    if a.degree == 0:
        raise ContractScalar("interior product of a 0-form")
    out: Dict[Index, ScalarPoly] = {}
    for idx, c in a.coeffs.items():
        for s, i in enumerate(idx):
            xi = X.components[i]
            if not xi:
                continue
            v = xi * c
            if s % 2:
                v = -v
            key = idx[:s] + idx[s + 1:]
            if key in out:
                v = out[key] + v
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return DiffForm._make(a.space, a.degree - 1, out)


def lie_deriv_form(X: VectorField, a) -> DiffForm:
    """Lie derivative of a form by the Cartan formula; ``X(f)`` on 0-forms."""
    a = as_form(a)
    _check_space(X, a)
    if a.degree == 0:
        return DiffForm.scalar(X(a.scalar_part))
    return interior_prod(X, ext_d(a)) + ext_d(interior_prod(X, a))


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """Commutator ``[X, Y]^i = X(Y^i) - Y(X^i)``."""
    _check_space(X, Y)
    return VectorField(X.space, [X(yi) - Y(xi) for xi, yi in zip(X, Y)])


def lie_deriv(X: VectorField, target):
    """Lie derivative of a function, vector field or form."""
    if isinstance(target, ScalarPoly):
        return X(target)
    if isinstance(target, VectorField):
        return lie_bracket(X, target)
    if isinstance(target, DiffForm):
        return lie_deriv_form(X, target)
    raise TypeError(f"cannot take a Lie derivative of {type(target).__name__}")


def divergence(X: VectorField) -> ScalarPoly:
    out = X.space.zero()
    for i, c in enumerate(X.components):
        out = out + c.diff(i)
    return out


# ---- maps -------------------------------------------------------------------


class PolyMap:
    """Polynomial self-map of R^2n with a verified polynomial inverse."""

    __slots__ = ("space", "forward", "inverse")

    def __init__(self, space: PhaseSpace, forward: Sequence, inverse: Sequence):
        fwd = tuple(f if isinstance(f, ScalarPoly) else space.const(f) for f in forward)
        inv = tuple(f if isinstance(f, ScalarPoly) else space.const(f) for f in inverse)
        if len(fwd) != space.dim or len(inv) != space.dim:
            raise DimensionError(f"map needs {space.dim} components in each direction")
        for f in fwd + inv:
            if f.space != space:
                raise SpaceMismatch("map component from a different phase space")
        coords = space.coords
        for i in range(space.dim):
            if fwd[i].compose(inv) != coords[i]:
                raise NotInvertible(f"forward(inverse(x)) differs from x in component {i}")
            if inv[i].compose(fwd) != coords[i]:
                raise NotInvertible(f"inverse(forward(x)) differs from x in component {i}")
        self.space = space
        self.forward = fwd
        self.inverse = inv

    @classmethod
    def identity(cls, space: PhaseSpace) -> "PolyMap":
        return cls(space, space.coords, space.coords)

    def pull(self, f: ScalarPoly) -> ScalarPoly:
        """``f o Phi``."""
        return f.compose(self.forward)

    def push(self, f: ScalarPoly) -> ScalarPoly:
        """``f o Phi^{-1}``."""
        return f.compose(self.inverse)

    def inverted(self) -> "PolyMap":
        return PolyMap(self.space, self.inverse, self.forward)

    def __eq__(self, other):
        if not isinstance(other, PolyMap):
            return NotImplemented
        return self.space == other.space and self.forward == other.forward and self.inverse == other.inverse

    def __hash__(self):
        return hash((self.space, self.forward, self.inverse))

    def __str__(self):
        f = ", ".join(str(c) for c in self.forward)
        g = ", ".join(str(c) for c in self.inverse)
        return f"({f}) inverse ({g})"

    def __repr__(self):
        return f"PolyMap({self})"


def pullback_form(phi: PolyMap, a) -> DiffForm:
    a = as_form(a)
    _check_space(phi, a)
    if a.degree == 0:
        return DiffForm.scalar(phi.pull(a.scalar_part))
    dphi = [ext_d(f) for f in phi.forward]
    out = DiffForm.zero(a.space, a.degree)
    for idx, c in a.coeffs.items():
        term = DiffForm.scalar(phi.pull(c))
        for i in idx:
            term = wedge(term, dphi[i])
        out = out + term
    return out


def pushforward_field(phi: PolyMap, X: VectorField) -> VectorField:
    _check_space(phi, X)
    comps = []
    for f in phi.forward:
        comps.append(phi.push(X(f)))
    return VectorField(X.space, comps)


def dx(space: PhaseSpace, i) -> DiffForm:
    return DiffForm.dx(space, i)
