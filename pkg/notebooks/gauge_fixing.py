"""
Gauge fixing for the harmonic oscillator
========================================

Near the equilibrium of ``G = p d/dq - q d/dp`` the strong gauge equation
``L_G f = -i(G) alpha`` has no solution for ``alpha = p dq``: its right-hand
side ``-p^2`` has nonzero average over every circle, while ``L_G f`` always
averages to zero. The weaker condition ``del_G(alpha + df) = 0`` can be met.
"""

from canonoid import DiffForm, PhaseSpace, TwistedContext, VectorField, del_gamma, ext_d
from canonoid import gauge_fix_strong, gauge_fix_weak

space = PhaseSpace(1)
q, p = space.coords
Dq, Dp = VectorField.basis(space, "q"), VectorField.basis(space, "p")
ctx = TwistedContext(Dq * p - Dp * q)
alpha = DiffForm.dx(space, "q") * p

for bound in (2, 4, 8):
    res = gauge_fix_strong(ctx, alpha, bound)
    print(f"strong, degree <= {bound}: {res.status}")

res = gauge_fix_weak(ctx, alpha, 2)
print("weak:", res.status, "f =", res.f)
fixed = alpha + ext_d(res.f)
print("alpha + df =", fixed)
print("del_G(alpha + df) =", del_gamma(ctx, fixed))
