"""
Splitting a symmetry into a gauge-fixed part and an exact part
==============================================================

For the free particle and any polynomial f(p), the field
``X = -f(p) (q d/dq + p d/dp)`` commutes with the dynamics. Its 1-form
splits as ``beta = alpha + dG`` with ``del_gamma(alpha) = 0``; then G is a
generator of constants of motion of degree one and ``F = -L_gamma G`` is
conserved.
"""

from canonoid import (
    DiffForm,
    PhaseSpace,
    TwistedContext,
    VectorField,
    canonical_omega,
    classify_field,
    decompose_symmetry,
    ext_d,
)

space = PhaseSpace(1)
q, p = space.coords
dp = DiffForm.dx(space, "p")
gamma = VectorField.basis(space, "q") * p
ctx = TwistedContext(gamma)

for f in (p, p ** 2, 1 + p ** 3):
    G = q * p * f
    alpha = dp * (-(2 * f + p * f.diff(1)) * q)
    beta = alpha + ext_d(G)
    d = decompose_symmetry(ctx, beta, alpha, G)
    print(f"f = {f}")
    print("  beta   =", beta)
    print("  X_beta =", d.X_beta)
    print("  F      =", d.F)
    print("  checks =", vars(d.checks))

    # not canonical, not even up to a constant factor
    c = classify_field(canonical_omega(space), d.X_beta)
    print("  L_X omega =", c.lie_derivative_omega, "valence:", c.canonical_valence)
