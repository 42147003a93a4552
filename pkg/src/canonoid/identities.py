"""Executable catalogue of operator identities and proposition checks.

Each check draws a seeded random instance, evaluates both sides with exact
arithmetic and reports whether they agree. Biconditional checks tag every
instance with the truth value of their left-hand side so that the runner can
demand enough instances in each direction.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

from . import randgen as rg
from .classifiers import (
    bracket_hamiltonian,
    canonoid_infinitesimal,
    com_degree,
    dynamics_hamiltonian,
    master_degree,
)
from .forms import DiffForm, VectorField, ext_d, interior_prod, lie_bracket, lie_deriv_form, wedge
from .poly import PhaseSpace, ScalarPoly
from .symplectic import canonical_omega, flat, hamiltonian_field, homotopy_operator as h, homotopy_potential, sharp
from .twisted import TwistedContext, d_gamma, del_gamma, iter_lie

d = ext_d
L = lie_deriv_form


def i(X, a):
    return interior_prod(X, a)


def dX(X, a):
    return d(i(X, d(a)))


def pX(X, a):
    return i(X, d(i(X, a)))


def L2(X, a):
    return L(X, L(X, a))


def _deg(rng, space, lo, hi=None):
    return rng.randint(lo, space.dim if hi is None else hi)


def _sign(r):
    return -1 if r % 2 else 1


@dataclass(frozen=True)
class Check:
    name: str
    group: str
    fn: Callable
    directions: Tuple[str, ...] = ("any",)
    dims: Tuple[int, ...] = (2, 4)


@dataclass
class CheckResult:
    name: str
    group: str
    dim: int
    counts: dict
    failures: List[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def cases(self) -> int:
        return sum(self.counts.values())

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self):
        return {
            "name": self.name, "group": self.group, "dim": self.dim,
            "cases": self.cases, "counts": dict(self.counts),
            "failures": list(self.failures), "passed": self.passed,
            "seconds": round(self.seconds, 3),
        }


REGISTRY: List[Check] = []


def check(name, group, directions=("any",), dims=(2, 4)):
    def deco(fn):
        REGISTRY.append(Check(name, group, fn, directions, dims))
        return fn
    return deco


# ---- twisted-operator catalogue ---------------------------------------------

@check("d_X o d_X = 0", "operators")
def _dd(rng, space):
    X = rg.random_field(rng, space)
    a = rg.random_form(rng, space, _deg(rng, space, 0))
    return dX(X, dX(X, a)).is_zero(), "any"


@check("d o d_X = d_X o d = 0", "operators")
def _d_dX(rng, space):
    X = rg.random_field(rng, space)
    a = rg.random_form(rng, space, _deg(rng, space, 0))
    return d(dX(X, a)).is_zero() and dX(X, d(a)).is_zero(), "any"


@check("d_X o L_X = L_X o d_X", "operators")
def _dX_L(rng, space):
    X = rg.random_field(rng, space)
    a = rg.random_form(rng, space, _deg(rng, space, 0))
    return dX(X, L(X, a)) == L(X, dX(X, a)), "any"


@check("d_X o i(X) + i(X) o d_X = L_X^2", "operators")
def _dX_i(rng, space):
    X = rg.random_field(rng, space)
    a = rg.random_form(rng, space, _deg(rng, space, 1))
    return dX(X, i(X, a)) + i(X, dX(X, a)) == L2(X, a), "any"


@check("d_X product rule", "operators")
def _dX_wedge(rng, space):
    X = rg.random_field(rng, space)
    r = _deg(rng, space, 0, space.n)
    a = rg.random_form(rng, space, r)
    b = rg.random_form(rng, space, r)
    s = _sign(r)
    rhs = (wedge(dX(X, a), b) + wedge(a, dX(X, b)) * s
           + wedge(d(a), L(X, b)) + wedge(L(X, a), d(b)) * s)
    return dX(X, wedge(a, b)) == rhs, "any"


@check("del_X o del_X = 0 and i(X) o del_X = del_X o i(X) = 0", "operators")
def _pp(rng, space):
    X = rg.random_field(rng, space)
    a = rg.random_form(rng, space, _deg(rng, space, 2))
    return (pX(X, pX(X, a)).is_zero() and i(X, pX(X, a)).is_zero()
            and pX(X, i(X, a)).is_zero()), "any"


@check("del_X o L_X = L_X o del_X", "operators")
def _pX_L(rng, space):
    X = rg.random_field(rng, space)
    a = rg.random_form(rng, space, _deg(rng, space, 1))
    return pX(X, L(X, a)) == L(X, pX(X, a)), "any"


@check("del_X o d = i(X) o d_X and d o del_X = d_X o i(X)", "operators")
def _pX_d(rng, space):
    X = rg.random_field(rng, space)
    a = rg.random_form(rng, space, _deg(rng, space, 1))
    f = rg.random_form(rng, space, 0)
    return (pX(X, d(a)) == i(X, dX(X, a)) and pX(X, d(f)) == i(X, dX(X, f))
            and d(pX(X, a)) == dX(X, i(X, a))), "any"


@check("del_X o d + d o del_X = L_X^2", "operators")
def _pX_d_sum(rng, space):
    X = rg.random_field(rng, space)
    a = rg.random_form(rng, space, _deg(rng, space, 1))
    return pX(X, d(a)) + d(pX(X, a)) == L2(X, a), "any"


@check("del_X o d_X + d_X o del_X = L_X^3", "operators")
def _pX_dX(rng, space):
    X = rg.random_field(rng, space)
    a = rg.random_form(rng, space, _deg(rng, space, 1))
    return pX(X, dX(X, a)) + dX(X, pX(X, a)) == L(X, L2(X, a)), "any"


@check("del_X product rule", "operators")
def _pX_wedge(rng, space):
    X = rg.random_field(rng, space)
    r = _deg(rng, space, 1, space.n)
    a = rg.random_form(rng, space, r)
    b = rg.random_form(rng, space, r)
    s = _sign(r)
    rhs = (wedge(pX(X, a), b) + wedge(a, pX(X, b)) * s
           + wedge(i(X, a), L(X, b)) + wedge(L(X, a), i(X, b)) * s)
    return pX(X, wedge(a, b)) == rhs, "any"


# ---- closed/exact spaces and alternative forms --------------------------------

@check("exact forms are d_X-closed: d_X(d b) = 0", "inclusions")
def _incl_exact(rng, space):
    X = rg.random_field(rng, space)
    b = rg.random_form(rng, space, _deg(rng, space, 0, space.dim - 1))
    return dX(X, d(b)).is_zero(), "any"


@check("d_X-exact forms are closed: d(L_X d b) = 0", "inclusions")
def _incl_twexact(rng, space):
    X = rg.random_field(rng, space)
    b = rg.random_form(rng, space, _deg(rng, space, 0, space.dim - 1))
    return d(L(X, d(b))).is_zero(), "any"


@check("B_X = L_X(B): d_X b = L_X(d b)", "inclusions")
def _incl_image(rng, space):
    X = rg.random_field(rng, space)
    b = rg.random_form(rng, space, _deg(rng, space, 0, space.dim - 1))
    return dX(X, b) == L(X, d(b)), "any"


@check("d_X = d o L_X = L_X o d", "inclusions")
def _alt_dX(rng, space):
    X = rg.random_field(rng, space)
    a = rg.random_form(rng, space, _deg(rng, space, 0))
    return dX(X, a) == d(L(X, a)) == L(X, d(a)), "any"


@check("del_X = i(X) o L_X = L_X o i(X)", "inclusions")
def _alt_pX(rng, space):
    X = rg.random_field(rng, space)
    a = rg.random_form(rng, space, _deg(rng, space, 1))
    return pX(X, a) == i(X, L(X, a)) == L(X, i(X, a)), "any"


@check("twisted operators commute with L_Gamma", "inclusions")
def _commute_dynamics(rng, space):
    _, gamma = rg.random_hamiltonian_dynamics(rng, space, max_degree=2)
    ctx = TwistedContext(gamma)
    a = rg.random_form(rng, space, _deg(rng, space, 1))
    return (L(gamma, d_gamma(ctx, a)) == d_gamma(ctx, L(gamma, a))
            and L(gamma, del_gamma(ctx, a)) == del_gamma(ctx, L(gamma, a))), "any"


# ---- propositions -----------------------------------------------------------

def _dynamics(rng, space):
    """Locally-Hamiltonian dynamics, half of the time the nilpotent free flow."""
    if rng.random() < 0.5:
        gamma = rg.free_dynamics(space)
        return TwistedContext(gamma)
    _, gamma = rg.random_hamiltonian_dynamics(rng, space, max_degree=2)
    return TwistedContext(gamma)


def _dilation(space):
    return VectorField.euler(space)


@check("canonoid iff [X,Gamma] locally Hamiltonian", "propositions", ("pos", "neg"))
def _prop_canonoid(rng, space):
    ctx = _dynamics(rng, space)
    omega = ctx.omega
    K = rg.random_poly(rng, space, 3)
    X = hamiltonian_field(omega, K)
    if rng.random() < 0.5:
        X = X + _dilation(space) * rng.randint(-2, 2)
    else:
        X = X + rg.random_field(rng, space, 2)
    route_a = canonoid_infinitesimal(ctx, X).is_canonoid
    route_b = ext_d(flat(omega, lie_bracket(X, ctx.gamma))).is_zero()
    bracket_hamiltonian(ctx, X)  # raises on disagreement
    return route_a == route_b, "pos" if route_a else "neg"


def _conserved(rng, ctx, H):
    space = ctx.space
    if H is None:
        # free flow: functions of the momenta are conserved
        return rg.random_poly_in(rng, space, range(space.n, space.dim), 3)
    return H * rng.randint(-2, 2) + H * H * rng.randint(-1, 1) + rng.randint(-3, 3)


@check("d_Gamma f = 0 iff [Gamma, X_f] = 0", "propositions", ("pos", "neg"))
def _prop_z0(rng, space):
    if rng.random() < 0.5:
        ctx = TwistedContext(rg.free_dynamics(space))
        H = None
    else:
        H, gamma = rg.random_hamiltonian_dynamics(rng, space, max_degree=2)
        ctx = TwistedContext(gamma)
    f = _conserved(rng, ctx, H) if rng.random() < 0.5 else rg.random_poly(rng, space, 3)
    if f.is_constant():
        f = f + space.q(0) * space.p(0)
    lhs = d_gamma(ctx, f).is_zero()
    rhs = lie_bracket(ctx.gamma, hamiltonian_field(ctx.omega, f)).is_zero()
    return lhs == rhs, "pos" if lhs else "neg"


@check("X_{d_Gamma f} = [Gamma, X_f]", "propositions")
def _prop_bracket(rng, space):
    ctx = _dynamics(rng, space)
    f = rg.random_poly(rng, space, 3)
    return sharp(ctx.omega, d_gamma(ctx, f)) == lie_bracket(ctx.gamma, hamiltonian_field(ctx.omega, f)), "any"


def _symmetry(rng, ctx, free):
    """A dynamical symmetry of ctx.gamma."""
    space = ctx.space
    if free:
        # Hamiltonian symmetries plus a dilation; the dilation commutes with linear flows
        n = space.n
        K = _conserved(rng, ctx, None)
        if n > 1:
            ang = space.q(0) * space.p(1) - space.q(1) * space.p(0)
            K = K + ang * rng.randint(-2, 2)
        S = hamiltonian_field(ctx.omega, K) + _dilation(space) * rng.randint(-2, 2)
        if n == 1:
            f = rg.random_poly_in(rng, space, {1}, 2)
            S = S + VectorField(space, [space.q(0) * f, space.p(0) * f])
        return S
    H = dynamics_hamiltonian(ctx)
    return hamiltonian_field(ctx.omega, H * rng.randint(-2, 2) + H * H * rng.randint(-1, 1)) + ctx.gamma * rng.randint(-1, 1)


@check("d_Gamma beta = 0 iff d(i(Gamma) L_{X_beta} omega) = 0", "propositions", ("pos", "neg"))
def _prop_dgamma_beta(rng, space):
    free = rng.random() < 0.5
    ctx = TwistedContext(rg.free_dynamics(space)) if free else _dynamics(rng, space)
    choice = rng.random()
    if choice < 0.25:
        beta = d(rg.random_poly(rng, space, 3))
    elif choice < 0.5:
        beta = flat(ctx.omega, _symmetry(rng, ctx, ctx.gamma == rg.free_dynamics(space)))
        beta = beta + d(rg.random_poly(rng, space, 2))
    else:
        beta = rg.random_form(rng, space, 1)
    lhs = d_gamma(ctx, beta).is_zero()
    X_beta = sharp(ctx.omega, beta)
    rhs = d(i(ctx.gamma, L(X_beta, ctx.omega.form))).is_zero()
    return lhs == rhs, "pos" if lhs else "neg"


@check("degree-m generator T gives master symmetry X_T of degree <= m", "propositions", ("pos",))
def _prop_master_generator(rng, space):
    ctx = TwistedContext(rg.free_dynamics(space))
    T = rg.random_poly(rng, space, 3)
    com = com_degree(ctx, T)
    if com.degree is None:
        return True, None
    m = com.degree
    ms = master_degree(ctx, hamiltonian_field(ctx.omega, T))
    ok = ms.degree is not None and ms.degree <= m
    if m >= 0 and not d(iter_lie(ctx, T, m)).is_zero():
        ok = ok and ms.degree == m
    return ok, "pos"


@check("d_Gamma beta = 0 and X_beta of degree m gives d L^m i(Gamma) beta = 0", "propositions", ("pos",))
def _prop_canonoid_master(rng, space):
    ctx = TwistedContext(rg.free_dynamics(space))
    beta = d(rg.random_poly(rng, space, 3))
    if rng.random() < 0.6:
        beta = beta + flat(ctx.omega, _symmetry(rng, ctx, True))
    if not d_gamma(ctx, beta).is_zero():
        return False, "pos"
    m = master_degree(ctx, sharp(ctx.omega, beta)).degree
    if m is None or m < 1:
        return True, None
    return d(iter_lie(ctx, i(ctx.gamma, beta).scalar_part, m)).is_zero(), "pos"


@check("assembled beta = alpha + dG is a canonoid symmetry", "propositions", ("pos",), dims=(2,))
def _prop_converse(rng, space):
    q, p = space.coords
    ctx = TwistedContext(rg.free_dynamics(space))
    f = rg.random_poly_in(rng, space, {1}, 3)
    G = q * p * f
    F = -ctx.gamma(G)
    if rng.random() < 0.5:
        alpha = DiffForm.dx(space, 1) * (-(f * 2 + p * f.diff(1)) * q)
    else:
        alpha = -d(G)
    pre = (ctx.gamma(F).is_zero() and L(ctx.gamma, alpha) == d(F)
           and del_gamma(ctx, alpha).is_zero())
    if not pre:
        return False, "pos"
    beta = alpha + d(G)
    X_beta = sharp(ctx.omega, beta)
    return d_gamma(ctx, beta).is_zero() and lie_bracket(X_beta, ctx.gamma).is_zero(), "pos"


@check("L_X omega = a omega and L_X H = a H give [X, Gamma_H] = 0", "propositions", ("pos",))
def _prop_dilation(rng, space):
    omega = canonical_omega(space)
    H = _homogeneous_part(rg.random_poly(rng, space, 2, density=0.6), 2)
    if H.is_zero():
        return True, None
    X = _dilation(space)
    pre = L(X, omega.form) == omega.form * 2 and X(H) == H * 2
    return pre and lie_bracket(X, hamiltonian_field(omega, H)).is_zero(), "pos"


def _homogeneous_part(f, degree):
    return ScalarPoly(f.space, {e: c for e, c in f.terms.items() if sum(e) == degree})


@check("symmetry X_alpha gives d_Gamma alpha = 0 and del_Gamma alpha = 0", "propositions", ("pos",))
def _prop_gauge_symmetry(rng, space):
    free = rng.random() < 0.5
    ctx = TwistedContext(rg.free_dynamics(space)) if free else _dynamics(rng, space)
    free = ctx.gamma == rg.free_dynamics(space)
    S = _symmetry(rng, ctx, free)
    if not lie_bracket(S, ctx.gamma).is_zero():
        return False, "pos"
    alpha = flat(ctx.omega, S)
    return d_gamma(ctx, alpha).is_zero() and del_gamma(ctx, alpha).is_zero(), "pos"


# ---- homotopy operator -----------------------------------------------------

@check("closed forms: homotopy residual 0 and d(primitive) = input", "homotopy")
def _homotopy_closed(rng, space):
    a = rg.closed_form(rng, space, _deg(rng, space, 1))
    pot = homotopy_potential(a)
    return pot.exact and d(pot.primitive) == a, "any"


@check("non-closed forms: homotopy residual nonzero", "homotopy")
def _homotopy_open(rng, space):
    while True:
        a = rg.random_form(rng, space, _deg(rng, space, 1, space.dim - 1))
        if not d(a).is_zero():
            break
    return not homotopy_potential(a).exact, "any"


@check("homotopy identity d h + h d = id", "homotopy")
def _homotopy_identity(rng, space):
    k = _deg(rng, space, 0)
    a = rg.random_form(rng, space, k)
    if k == 0:
        f = a.scalar_part
        return h(d(a)).scalar_part == f - f.constant_term(), "any"
    da = d(a)
    total = d(h(a)) + (h(da) if da.degree <= space.dim else DiffForm.zero(space, k))
    return total == a, "any"


# ---- runner ---------------------------------------------------------------

def run_check(chk: Check, dim: int, seed=0, cases: int = 100, max_attempts: Optional[int] = None) -> CheckResult:
    space = PhaseSpace(dim // 2)
    counts = {dname: 0 for dname in chk.directions}
    result = CheckResult(chk.name, chk.group, dim, counts)
    budget = max_attempts or cases * 25
    start = time.perf_counter()
    attempt = 0
    while any(v < cases for v in counts.values()) and attempt < budget:
        rng = rg.rng_for(seed, chk.name, dim, attempt)
        ok, direction = chk.fn(rng, space)
        attempt += 1
        if direction is None:
            continue
        if direction not in counts:
            direction = chk.directions[0]
        if counts[direction] >= cases:
            if ok:
                continue
        counts[direction] += 1
        if not ok:
            result.failures.append(f"attempt {attempt - 1} ({direction})")
    for dname, v in counts.items():
        if v < cases:
            result.failures.append(f"only {v} instances for direction {dname}")
    result.seconds = time.perf_counter() - start
    return result


GROUPS = ("operators", "inclusions", "propositions", "homotopy")


def select(groups: Optional[Sequence[str]] = None) -> List[Check]:
    return [c for c in REGISTRY if groups is None or c.group in groups]


def run_suite(seed=0, cases: int = 100, groups: Optional[Sequence[str]] = None,
              dims: Sequence[int] = (2, 4), workers: Optional[int] = 1) -> List[CheckResult]:
    jobs = [(c, dim) for c in select(groups) for dim in dims if dim in c.dims]
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(lambda job: run_check(job[0], job[1], seed, cases), jobs))
    return [run_check(c, dim, seed, cases) for c, dim in jobs]
