"""Twisted operators built from the dynamics.

``d_gamma = d o i(G) o d`` raises degree by one and ``del_gamma =
i(G) o d o i(G)`` lowers it; both square to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ContractScalar, IterationBudgetExceeded
from .forms import DiffForm, VectorField, as_form, ext_d, interior_prod, lie_deriv
from .symplectic import SymplecticForm, canonical_omega

DEFAULT_MAX_ITER = 16


@dataclass(frozen=True)
class TwistedContext:
    gamma: VectorField
    omega: SymplecticForm = field(default=None)
    max_iter: int = DEFAULT_MAX_ITER

    def __post_init__(self):
        if self.omega is None:
            object.__setattr__(self, "omega", canonical_omega(self.gamma.space))

    @property
    def space(self):
        return self.gamma.space


def d_gamma(ctx: TwistedContext, a) -> DiffForm:
    a = as_form(a)
    return ext_d(interior_prod(ctx.gamma, ext_d(a)))


def del_gamma(ctx: TwistedContext, a) -> DiffForm:
    a = as_form(a)
    if a.degree == 0:
        raise ContractScalar("del_gamma is undefined on 0-forms")
    return interior_prod(ctx.gamma, ext_d(interior_prod(ctx.gamma, a)))


def iter_lie(ctx: TwistedContext, target, k: int):
    """``L_gamma^k`` applied to a function, vector field or form."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > ctx.max_iter:
        raise IterationBudgetExceeded(f"k={k} exceeds the budget {ctx.max_iter}", budget=ctx.max_iter)
    for _ in range(k):
        target = lie_deriv(ctx.gamma, target)
    return target
