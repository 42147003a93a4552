"""Symplectic structure: validation, musical maps, Poisson bracket, potentials.

Conventions (fixed package-wide): ``omega_0 = sum dq_i ^ dp_i`` and the
Hamiltonian field of ``f`` is defined by ``i(X_f) omega = df``, so that
``X_f = sum df/dp_i d/dq_i - df/dq_i d/dp_i`` and ``{q, p} = +1``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from . import linalg
from .errors import DegenerateOmega, NonconstantOmega, PostconditionFailed, WrongDegree
from .forms import DiffForm, VectorField, ext_d, interior_prod, lie_deriv_form
from .poly import PhaseSpace, ScalarPoly

CONVENTION = "omega=sum dq_i^dp_i; i(X_f)omega=df; {q,p}=+1"

N_SAMPLES = 24


@dataclass(frozen=True)
class ConstantNonzeroDet:
    det: Fraction
    kind = "ConstantNonzeroDet"


@dataclass(frozen=True)
class SampledNonzeroDet:
    """Determinant nonzero at every sample point. Evidence, not proof."""

    det: ScalarPoly
    points: Tuple[Tuple[Fraction, ...], ...]
    kind = "SampledNonzeroDet"


@dataclass(frozen=True)
class Degenerate:
    det: ScalarPoly
    point: Tuple[Fraction, ...]
    kind = "Degenerate"


@dataclass(frozen=True)
class SymplecticForm:
    form: DiffForm
    closed: bool
    evidence: object

    @property
    def space(self) -> PhaseSpace:
        return self.form.space

    @property
    def nondegenerate(self) -> bool:
        return not isinstance(self.evidence, Degenerate)

    @property
    def is_valid(self) -> bool:
        return self.closed and self.nondegenerate

    @property
    def is_constant(self) -> bool:
        return all(c.is_constant() for c in self.form.coeffs.values())

    def matrix(self):
        return coefficient_matrix(self.form)


def coefficient_matrix(form: DiffForm):
    """Antisymmetric matrix ``M`` with ``form = sum_{i<j} M[i][j] dx_i ^ dx_j``."""
    if form.degree != 2:
        raise WrongDegree("coefficient matrix needs a 2-form")
    space = form.space
    m = [[space.zero()] * space.dim for _ in range(space.dim)]
    for (i, j), c in form.coeffs.items():
        m[i][j] = c
        m[j][i] = -c
    return m


def determinant(m) -> ScalarPoly:
    """Determinant of a square polynomial matrix by memoised Laplace expansion."""
    n = len(m)
    memo = {}

    def minor(row, cols):
        if row == n:
            return m[0][0].space.one()
        key = (row, cols)
        if key in memo:
            return memo[key]
        total = m[0][0].space.zero()
        sign = 1
        # sign alternates over the still-free columns only
        for j in range(n):
            if cols >> j & 1:
                continue
            c = m[row][j]
            if c:
                sub = minor(row + 1, cols | (1 << j))
                if sub:
                    term = c * sub
                    total = total + term if sign > 0 else total - term
            sign = -sign
        memo[key] = total
        return total

    return minor(0, 0)


def sample_points(space: PhaseSpace, count: int = N_SAMPLES):
    """Deterministic rational sample points; the origin comes first."""
    rng = random.Random(20260101 + space.dim)
    pts = [tuple(Fraction(0) for _ in range(space.dim))]
    while len(pts) < count:
        pts.append(tuple(Fraction(rng.randint(-7, 7), rng.randint(1, 4)) for _ in range(space.dim)))
    return tuple(pts)


def validate_symplectic(a: DiffForm) -> SymplecticForm:
    if a.degree != 2:
        raise WrongDegree(f"a symplectic form has degree 2, got {a.degree}")
    closed = ext_d(a).is_zero()
    det = determinant(coefficient_matrix(a))
    if det.is_constant():
        c = det.constant_term()
        if c:
            evidence = ConstantNonzeroDet(Fraction(c))
        else:
            evidence = Degenerate(det, tuple(Fraction(0) for _ in range(a.space.dim)))
    else:
        pts = sample_points(a.space)
        bad = next((pt for pt in pts if det.eval(pt) == 0), None)
        evidence = Degenerate(det, bad) if bad is not None else SampledNonzeroDet(det, pts)
    return SymplecticForm(a, closed, evidence)


def canonical_form(space: PhaseSpace) -> DiffForm:
    n = space.n
    return DiffForm(space, 2, {(i, n + i): 1 for i in range(n)})


def canonical_omega(space: PhaseSpace) -> SymplecticForm:
    return validate_symplectic(canonical_form(space))


def flat(omega: SymplecticForm, X: VectorField) -> DiffForm:
    return interior_prod(X, omega.form)


def _constant_inverse_transpose(omega: SymplecticForm):
    if not omega.is_constant:
        raise NonconstantOmega("sharp needs a constant-coefficient symplectic form")
    m = coefficient_matrix(omega.form)
    mt = [[m[j][i].constant_term() for j in range(len(m))] for i in range(len(m))]
    inv = linalg.inverse(mt)
    if inv is None:
        raise DegenerateOmega("symplectic form is degenerate")
    return inv


def sharp(omega: SymplecticForm, beta: DiffForm) -> VectorField:
    """The unique ``X`` with ``i(X) omega = beta``."""
    if beta.degree != 1:
        raise WrongDegree("sharp acts on 1-forms")
    inv = _constant_inverse_transpose(omega)
    b = beta.components()
    space = beta.space
    comps = []
    for row in inv:
        acc = space.zero()
        for c, bj in zip(row, b):
            if c and bj:
                acc = acc + bj * c
        comps.append(acc)
    return VectorField(space, comps)


def hamiltonian_field(omega: SymplecticForm, f: ScalarPoly) -> VectorField:
    return sharp(omega, ext_d(f))


def poisson(omega: SymplecticForm, f: ScalarPoly, g: ScalarPoly) -> ScalarPoly:
    """``{f, g} = omega(X_f, X_g) = X_g(f)``."""
    return hamiltonian_field(omega, g)(f)


def liouville_field(theta: DiffForm) -> VectorField:
    """Field ``X_1`` with ``i(X_1) omega = theta`` for ``omega = -d theta``."""
    if theta.degree != 1:
        raise WrongDegree("the Liouville field needs a 1-form")
    omega_form = -ext_d(theta)
    omega = validate_symplectic(omega_form)
    if not omega.nondegenerate:
        raise DegenerateOmega("-d(theta) is degenerate", form=str(omega_form))
    x1 = sharp(omega, theta)
    if lie_deriv_form(x1, omega_form) != -omega_form:
        raise PostconditionFailed("L_{X1} omega != -omega")
    return x1


@dataclass(frozen=True)
class Potential:
    primitive: DiffForm
    residual: DiffForm

    @property
    def exact(self) -> bool:
        return self.residual.is_zero()


def homotopy_operator(a: DiffForm) -> DiffForm:
    """Poincare homotopy operator on star-shaped R^2n (base point the origin).

    Each monomial ``x^m dx_I`` of a k-form maps to
    ``i(E)(x^m dx_I) / (k + |m|)`` where ``E`` is the Euler field.
    """
    if a.degree == 0:
        raise WrongDegree("homotopy operator needs degree >= 1")
    space = a.space
    k = a.degree
    scaled = {}
    for idx, c in a.coeffs.items():
        terms = {e: v * Fraction(1, k + sum(e)) for e, v in c.terms.items()}
        scaled[idx] = ScalarPoly(space, terms)
    return interior_prod(VectorField.euler(space), DiffForm(space, k, scaled))


def homotopy_potential(a: DiffForm) -> Potential:
    h = homotopy_operator(a)
    return Potential(h, a - ext_d(h))


def primitive_function(a: DiffForm) -> Optional[ScalarPoly]:
    """Function ``f`` with ``df = a`` vanishing at the origin, or None."""
    pot = homotopy_potential(a)
    return pot.primitive.scalar_part if pot.exact else None
