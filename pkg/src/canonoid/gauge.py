"""Gauge fixing as exact linear algebra over a bounded polynomial ansatz.

Given a 1-form ``alpha`` we look for a polynomial ``f`` making
``del_gamma(alpha + df)`` vanish, either through the strong equation
``L_G f = -i(G) alpha`` or the weak one ``L_G L_G f = -i(G) d i(G) alpha``.
``InfeasibleAtBound`` only says no solution exists of degree <= bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

from . import linalg
from .errors import InternalInconsistency
from .forms import DiffForm, ext_d, interior_prod
from .poly import Exponent, ScalarPoly, grlex_key, monomials_up_to
from .twisted import TwistedContext, del_gamma

STRONG = "strong"
WEAK = "weak"


@dataclass(frozen=True)
class LinearSystem:
    unknowns: Tuple[Exponent, ...]
    rows: Tuple[Exponent, ...]
    matrix: Tuple[Tuple[Fraction, ...], ...]
    rhs: Tuple[Fraction, ...]

    @classmethod
    def build(cls, space, degree_bound: int, operator: Callable[[ScalarPoly], ScalarPoly], target: ScalarPoly):
        """Match coefficients of ``operator(sum c_m x^m) == target``.

        The constant monomial is left out of the basis: it lies in the kernel
        of every operator used here, and dropping it pins it to zero.
        """
        basis = monomials_up_to(space, degree_bound, include_constant=False)
        images = [operator(ScalarPoly._make(space, {e: 1})) for e in basis]
        support = set(target.terms)
        for img in images:
            support.update(img.terms)
        rows = tuple(sorted(support, key=grlex_key))
        matrix = tuple(tuple(Fraction(img.coefficient(r)) for img in images) for r in rows)
        rhs = tuple(Fraction(target.coefficient(r)) for r in rows)
        return cls(tuple(basis), rows, matrix, rhs)

    def solve(self) -> Optional[List[Fraction]]:
        if not self.rows:
            return [Fraction(0)] * len(self.unknowns)
        if not self.unknowns:
            return [] if not any(self.rhs) else None
        return linalg.solve(self.matrix, self.rhs)


@dataclass(frozen=True)
class GaugeResult:
    status: str  # "Solved" | "InfeasibleAtBound"
    condition: str  # "strong" | "weak"
    bound: int
    f: Optional[ScalarPoly] = None

    @property
    def solved(self) -> bool:
        return self.status == "Solved"

    def gauge_fixed_form(self, alpha: DiffForm) -> DiffForm:
        return alpha + ext_d(self.f)


def _solve(ctx, alpha, degree_bound, operator, target, condition):
    if degree_bound < 1:
        raise ValueError("degree_bound must be >= 1")
    space = ctx.space
    system = LinearSystem.build(space, degree_bound, operator, target)
    x = system.solve()
    if x is None:
        return GaugeResult("InfeasibleAtBound", condition, degree_bound)
    f = ScalarPoly(space, {e: c for e, c in zip(system.unknowns, x)})
    if operator(f) != target:
        raise InternalInconsistency("gauge solution fails its own equation")
    if not del_gamma(ctx, alpha + ext_d(f)).is_zero():
        raise InternalInconsistency("gauge solution leaves del_gamma(alpha + df) nonzero")
    return GaugeResult("Solved", condition, degree_bound, f)


def gauge_fix_strong(ctx: TwistedContext, alpha: DiffForm, degree_bound: int) -> GaugeResult:
    """Solve ``L_gamma f = -i(gamma) alpha``."""
    gamma = ctx.gamma
    target = -interior_prod(gamma, alpha).scalar_part
    return _solve(ctx, alpha, degree_bound, gamma, target, STRONG)


def gauge_fix_weak(ctx: TwistedContext, alpha: DiffForm, degree_bound: int) -> GaugeResult:
    """Solve ``L_gamma L_gamma f = -i(gamma) d i(gamma) alpha``."""
    gamma = ctx.gamma
    target = -gamma(interior_prod(gamma, alpha).scalar_part)
    return _solve(ctx, alpha, degree_bound, lambda f: gamma(gamma(f)), target, WEAK)
