"""Decision procedures for canonical, canonoid and master-symmetry questions.

Every verdict carries its witnesses. Potentials (H, K, H', F) come from the
homotopy operator and therefore vanish at the origin; compare them against
expected values modulo additive constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Optional, Sequence, Tuple

from .errors import (
    DegreeMismatch,
    GaugeNotFixed,
    InternalInconsistency,
    NotCanonoid,
    NotDecomposition,
)
from .forms import (
    DiffForm,
    PolyMap,
    VectorField,
    ext_d,
    interior_prod,
    lie_bracket,
    lie_deriv_form,
    pullback_form,
)
from .poly import ScalarPoly
from .symplectic import (
    CONVENTION,
    SymplecticForm,
    flat,
    homotopy_potential,
    primitive_function,
    sharp,
)
from .twisted import DEFAULT_MAX_ITER, TwistedContext, d_gamma, del_gamma

DOMAIN_NOTE = (
    "M = R^2n is star-shaped and connected: closed forms are exact, so "
    "locally-Hamiltonian and Hamiltonian coincide"
)


def _notes(*extra):
    return (CONVENTION, DOMAIN_NOTE) + tuple(extra)


def proportionality(form: DiffForm, reference: DiffForm) -> Optional[Fraction]:
    """Constant ``r`` with ``form == r * reference``, else None."""
    if form.is_zero():
        return Fraction(0)
    if form.degree != reference.degree or set(form.coeffs) != set(reference.coeffs):
        return None
    ratio = None
    for idx, ref in reference.coeffs.items():
        c = form.coeffs[idx]
        e, v = next(iter(ref.terms.items()))
        r = Fraction(c.coefficient(e)) / Fraction(v)
        if ratio is None:
            ratio = r
        elif r != ratio:
            return None
        if c != ref * r:
            return None
    return ratio


@dataclass(frozen=True)
class FieldClassification:
    locally_hamiltonian: bool
    hamiltonian_witness: Optional[ScalarPoly]
    canonical_valence: Optional[Fraction]
    lie_derivative_omega: DiffForm
    notes: Tuple[str, ...] = field(default_factory=_notes)


def classify_field(omega: SymplecticForm, X: VectorField) -> FieldClassification:
    beta = flat(omega, X)
    H = primitive_function(beta)
    lie = lie_deriv_form(X, omega.form)
    valence = proportionality(lie, omega.form)
    return FieldClassification(H is not None, H, valence, lie)


@dataclass(frozen=True)
class CanonoidVerdict:
    is_canonoid: bool
    defining_form: DiffForm
    K: Optional[ScalarPoly] = None
    H_prime: Optional[ScalarPoly] = None
    K_is_conserved: Optional[bool] = None
    bracket_hamiltonian_function: Optional[ScalarPoly] = None
    dynamics_hamiltonian: Optional[ScalarPoly] = None
    valence: Optional[Fraction] = None
    notes: Tuple[str, ...] = field(default_factory=_notes)


def dynamics_hamiltonian(ctx: TwistedContext) -> Optional[ScalarPoly]:
    """H with ``i(Gamma) omega = dH`` when the dynamics is (locally) Hamiltonian."""
    return primitive_function(flat(ctx.omega, ctx.gamma))


def canonoid_infinitesimal(ctx: TwistedContext, X: VectorField) -> CanonoidVerdict:
    gamma, omega = ctx.gamma, ctx.omega
    sigma = interior_prod(gamma, lie_deriv_form(X, omega.form))
    if not ext_d(sigma).is_zero():
        return CanonoidVerdict(False, sigma)
    K = homotopy_potential(sigma).primitive.scalar_part
    conserved = gamma(K).is_zero()
    H = dynamics_hamiltonian(ctx)
    bracket_fn = None
    if H is not None:
        bracket_fn = X(H) - K
        if flat(omega, lie_bracket(X, gamma)) != ext_d(bracket_fn):
            raise InternalInconsistency("i([X,Gamma]) omega != d(L_X H - K)")
    return CanonoidVerdict(
        True, sigma, K=K, K_is_conserved=conserved,
        bracket_hamiltonian_function=bracket_fn, dynamics_hamiltonian=H,
    )


def canonoid_finite(ctx: TwistedContext, phi: PolyMap) -> CanonoidVerdict:
    omega = ctx.omega
    pulled = pullback_form(phi, omega.form)
    sigma = interior_prod(ctx.gamma, pulled)
    r = proportionality(pulled, omega.form)
    notes = _notes("negative valence: orientation reversing") if r is not None and r < 0 else _notes()
    if not ext_d(sigma).is_zero():
        return CanonoidVerdict(False, sigma, valence=r, notes=notes)
    Hp = homotopy_potential(sigma).primitive.scalar_part
    return CanonoidVerdict(
        True, sigma, H_prime=Hp, valence=r,
        dynamics_hamiltonian=dynamics_hamiltonian(ctx), notes=notes,
    )


def bracket_hamiltonian(ctx: TwistedContext, X: VectorField) -> FieldClassification:
    """Classify ``[X, Gamma]`` and cross-check against the canonoid test."""
    result = classify_field(ctx.omega, lie_bracket(X, ctx.gamma))
    if dynamics_hamiltonian(ctx) is not None:
        verdict = canonoid_infinitesimal(ctx, X)
        if verdict.is_canonoid != result.locally_hamiltonian:
            raise InternalInconsistency(
                "canonoid test and Hamiltonian character of [X, Gamma] disagree"
            )
    return result


@dataclass(frozen=True)
class MasterVerdict:
    degree: Optional[int]
    chain: Tuple[object, ...]
    budget: int
    hamiltonian_degree: Optional[int] = None

    @property
    def found(self) -> bool:
        return self.degree is not None

    @property
    def iterates(self) -> Tuple[object, ...]:
        """The nonzero chain followed by the vanishing iterate, when found."""
        if self.degree is None or not self.chain:
            return self.chain
        last = self.chain[-1]
        zero = VectorField.zero(last.space) if isinstance(last, VectorField) else last.space.zero()
        return self.chain + (zero,)


def _check_budget(budget):
    if budget < 1:
        raise ValueError("budget must be >= 1")


def master_degree(ctx: TwistedContext, Z: VectorField, budget: int = DEFAULT_MAX_ITER) -> MasterVerdict:
    """Smallest m <= budget with ``[...[[Z,G],G]...,G]`` (m+1 brackets) vanishing.

    A zero field has degree 0 and an empty chain.
    """
    _check_budget(budget)
    if Z.is_zero():
        return MasterVerdict(0, (), budget)
    chain = []
    current = Z
    for m in range(budget + 1):
        chain.append(current)
        current = lie_bracket(current, ctx.gamma)
        if current.is_zero():
            return MasterVerdict(m, tuple(chain), budget)
    return MasterVerdict(None, tuple(chain), budget)


def com_degree(ctx: TwistedContext, T: ScalarPoly, budget: int = DEFAULT_MAX_ITER) -> MasterVerdict:
    """Degree of T as a generator of constants of motion.

    ``hamiltonian_degree`` is the smallest m with ``d L^{m+1} T = 0``; it
    never exceeds ``degree``.
    """
    _check_budget(budget)
    if T.is_zero():
        return MasterVerdict(0, (), budget, 0)
    chain = []
    ham = None
    current = T
    for m in range(budget + 1):
        chain.append(current)
        current = ctx.gamma(current)
        if ham is None and current.is_constant():
            ham = m
        if current.is_zero():
            return MasterVerdict(m, tuple(chain), budget, ham)
    return MasterVerdict(None, tuple(chain), budget, ham)


def conserved_observable(ctx: TwistedContext, T: ScalarPoly, m: int) -> Tuple[ScalarPoly, ...]:
    """Coefficients ``A_n = L^n T`` of ``A(t) = sum (-1)^n A_n t^n / n!``."""
    verdict = com_degree(ctx, T, budget=max(m, 1))
    if verdict.degree != m:
        raise DegreeMismatch(f"T has degree {verdict.degree}, not {m}", actual=verdict.degree)
    coeffs = verdict.chain or (T,)
    gamma = ctx.gamma
    # (L_Gamma + d/dt) A = 0, coefficient by coefficient
    for n in range(m):
        lhs = gamma(coeffs[n]) * Fraction((-1) ** n, factorial(n))
        rhs = coeffs[n + 1] * Fraction((-1) ** (n + 1) * (n + 1), factorial(n + 1))
        if lhs + rhs:
            raise InternalInconsistency(f"observable recurrence fails at n={n}")
    if gamma(coeffs[m]):
        raise InternalInconsistency("last observable coefficient is not conserved")
    return coeffs


def observable_value(coeffs: Sequence[ScalarPoly], point, t) -> Fraction:
    """Evaluate ``A`` at a phase-space point and time ``t``."""
    t = Fraction(t)
    return sum(
        (Fraction((-1) ** n) * Fraction(a.eval(point)) * t ** n / factorial(n) for n, a in enumerate(coeffs)),
        Fraction(0),
    )


@dataclass(frozen=True)
class DecompositionChecks:
    del_gamma_alpha_zero: bool
    d_gamma_beta_zero: bool
    LG2_zero: bool
    F_conserved: Optional[bool]
    F_plus_LG_zero: Optional[bool]


@dataclass(frozen=True)
class Decomposition:
    beta: DiffForm
    alpha: DiffForm
    G: ScalarPoly
    F: Optional[ScalarPoly]
    X_beta: VectorField
    is_symmetry: bool
    checks: DecompositionChecks

    @property
    def all_checks(self) -> bool:
        return all(v is not False for v in vars(self.checks).values())


def decompose_symmetry(ctx: TwistedContext, beta: DiffForm, alpha: DiffForm, G: ScalarPoly) -> Decomposition:
    gamma = ctx.gamma
    if beta != alpha + ext_d(G):
        raise NotDecomposition("beta != alpha + dG")
    if not d_gamma(ctx, beta).is_zero():
        raise NotCanonoid("d_gamma(beta) != 0")
    if not del_gamma(ctx, alpha).is_zero():
        raise GaugeNotFixed("del_gamma(alpha) != 0")
    X_beta = sharp(ctx.omega, beta)
    symmetry = lie_bracket(X_beta, gamma).is_zero()
    LG = gamma(G)
    lg2 = gamma(LG).is_zero()
    F = None
    conserved = plus_zero = None
    if symmetry:
        pot = homotopy_potential(lie_deriv_form(gamma, alpha))
        if not pot.exact:
            raise InternalInconsistency("L_gamma(alpha) is not exact for a symmetry")
        F = pot.primitive.scalar_part
        shift = F + LG
        if not shift.is_constant():
            raise InternalInconsistency("F + L_gamma G is not constant")
        F = F - shift
        conserved = gamma(F).is_zero()
        plus_zero = (F + LG).is_zero()
    checks = DecompositionChecks(True, True, lg2, conserved, plus_zero)
    return Decomposition(beta, alpha, G, F, X_beta, symmetry, checks)
