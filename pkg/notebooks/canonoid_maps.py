"""
Canonoid maps of the free particle
==================================

A map is canonoid for a dynamics when the pulled-back symplectic form still
makes that dynamics Hamiltonian. Rescalings and the coordinate swap are
canonoid for ``G = p d/dq``; their valence is the factor in
``pullback(omega) = r omega``.
"""

from canonoid import PhaseSpace, PolyMap, TwistedContext, VectorField, canonoid_finite, pullback_form

space = PhaseSpace(1)
q, p = space.coords
ctx = TwistedContext(VectorField.basis(space, "q") * p)

maps = {
    "identity": PolyMap.identity(space),
    "stretch q": PolyMap(space, (2 * q, p), (q / 2, p)),
    "swap": PolyMap(space, (p, q), (p, q)),
    "shear": PolyMap(space, (q, p + q ** 2), (q, p - q ** 2)),
}

for name, phi in maps.items():
    v = canonoid_finite(ctx, phi)
    print(f"{name:10s} {str(phi):40s}")
    print(f"  pullback omega = {pullback_form(phi, ctx.omega.form)}")
    print(f"  canonoid: {v.is_canonoid}  valence: {v.valence}  H' = {v.H_prime}")
    for note in v.notes[2:]:
        print("  note:", note)
