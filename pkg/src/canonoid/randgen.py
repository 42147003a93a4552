"""Seeded random instances for identity testing.

Coefficients are small integers so failures are easy to read; exact
arithmetic means one pass per instance is conclusive.
"""

from __future__ import annotations

import itertools
import random

from .forms import DiffForm, PolyMap, VectorField, ext_d
from .poly import PhaseSpace, ScalarPoly, monomials_up_to
from .symplectic import canonical_omega, hamiltonian_field

MAX_DEGREE = 3
TARGET_TERMS = 5


def rng_for(seed, *labels) -> random.Random:
    return random.Random(f"{seed}:" + ":".join(str(x) for x in labels))


def random_poly(rng: random.Random, space: PhaseSpace, max_degree: int = MAX_DEGREE,
                density: float = None, coeff: int = 3, nonzero: bool = True) -> ScalarPoly:
    """Random polynomial of degree <= max_degree with small integer coefficients.

    The default density keeps about five expected terms whatever the dimension.
    """
    basis = monomials_up_to(space, max_degree)
    if density is None:
        density = min(0.4, TARGET_TERMS / len(basis))
    while True:
        terms = {}
        for e in basis:
            if rng.random() < density:
                c = rng.randint(-coeff, coeff)
                if c:
                    terms[e] = c
        f = ScalarPoly(space, terms)
        if f or not nonzero:
            return f


def random_poly_in(rng, space: PhaseSpace, coords, max_degree: int = MAX_DEGREE,
                   density: float = 0.5, coeff: int = 3) -> ScalarPoly:
    """Random polynomial depending only on the coordinates in ``coords``."""
    terms = {}
    for e in monomials_up_to(space, max_degree):
        if any(k for j, k in enumerate(e) if j not in coords):
            continue
        if rng.random() < density:
            terms[e] = rng.randint(-coeff, coeff)
    return ScalarPoly(space, terms)


def random_field(rng, space, max_degree=MAX_DEGREE, density=None) -> VectorField:
    return VectorField(space, [random_poly(rng, space, max_degree, density, nonzero=False)
                               for _ in range(space.dim)])


def random_form(rng, space, degree, max_degree=MAX_DEGREE, density=None) -> DiffForm:
    if degree == 0:
        return DiffForm.scalar(random_poly(rng, space, max_degree, density))
    coeffs = {}
    for idx in itertools.combinations(range(space.dim), degree):
        coeffs[idx] = random_poly(rng, space, max_degree, density, nonzero=False)
    form = DiffForm(space, degree, coeffs)
    if form.is_zero() and degree <= space.dim:
        return random_form(rng, space, degree, max_degree, density)
    return form


def random_hamiltonian_dynamics(rng, space, max_degree=MAX_DEGREE):
    """``(H, X_H)`` for random H; such a field is locally Hamiltonian."""
    H = random_poly(rng, space, max_degree + 1, density=0.3)
    return H, hamiltonian_field(canonical_omega(space), H)


def free_dynamics(space: PhaseSpace) -> VectorField:
    """``sum p_i d/dq_i``; its Lie derivative is nilpotent on polynomials."""
    n = space.n
    return VectorField(space, [space.p(i) for i in range(n)] + [space.zero()] * n)


def random_map(rng, space: PhaseSpace) -> PolyMap:
    """Composition of a few unimodular linear moves and polynomial shears."""
    phi = PolyMap.identity(space)
    coords = space.coords
    for _ in range(rng.randint(1, 3)):
        kind = rng.choice(("scale", "linear", "shear"))
        i = rng.randrange(space.dim)
        if kind == "scale":
            c = rng.choice((2, 3, -1, -2))
            fwd = list(coords)
            inv = list(coords)
            fwd[i] = coords[i] * c
            inv[i] = coords[i] / c
        else:
            j = rng.choice([k for k in range(space.dim) if k != i])
            if kind == "linear":
                g = coords[j] * rng.choice((1, -1, 2))
            else:
                g = coords[j] ** rng.randint(2, 3) * rng.choice((1, -1))
            fwd = list(coords)
            inv = list(coords)
            fwd[i] = coords[i] + g
            inv[i] = coords[i] - g
        step = PolyMap(space, fwd, inv)
        phi = compose_maps(step, phi)
    return phi


def compose_maps(outer: PolyMap, inner: PolyMap) -> PolyMap:
    """``outer o inner``."""
    fwd = [f.compose(inner.forward) for f in outer.forward]
    inv = [g.compose(outer.inverse) for g in inner.inverse]
    return PolyMap(outer.space, fwd, inv)


def closed_form(rng, space, degree, max_degree=MAX_DEGREE) -> DiffForm:
    """Exact ``degree``-form built as ``d`` of a random form."""
    while True:
        a = ext_d(random_form(rng, space, degree - 1, max_degree))
        if a:
            return a
