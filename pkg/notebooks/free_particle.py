"""
Master symmetries of the free particle
======================================

The free particle ``H = p^2/2`` has dynamics ``G = p d/dq``. Its position
is not conserved, but it generates a conserved observable once time is
allowed to enter linearly.
"""

from canonoid import (
    PhaseSpace,
    TwistedContext,
    VectorField,
    canonical_omega,
    com_degree,
    conserved_observable,
    master_degree,
    observable_value,
    poisson,
)

space = PhaseSpace(1)
q, p = space.coords
omega = canonical_omega(space)

H = p ** 2 / 2
gamma = VectorField.basis(space, "q") * p
ctx = TwistedContext(gamma)
print("dynamics:", gamma)

# d/dp brackets with the dynamics to d/dq, which commutes with it.
# So it is a master symmetry of degree one.
verdict = master_degree(ctx, VectorField.basis(space, "p"))
print("master degree of d/dp:", verdict.degree)
for k, Z in enumerate(verdict.iterates):
    print(f"  iterate {k}: {Z}")

# The function -q plays the same role for observables.
T = -q
print("{-q, H} =", poisson(omega, T, H))
chain = com_degree(ctx, T)
print("generator degree of -q:", chain.degree, "chain:", [str(x) for x in chain.iterates])

# A(t) = A_0 - A_1 t is constant along q(t) = q0 + p0 t.
coeffs = conserved_observable(ctx, T, chain.degree)
q0, p0 = 3, -2
for t in range(4):
    point = (q0 + p0 * t, p0)
    print(f"  t={t}: A = {observable_value(coeffs, point, t)}")
