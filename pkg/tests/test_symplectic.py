from fractions import Fraction

import pytest
from hypothesis import given

from canonoid import randgen as rg
from canonoid.errors import DegenerateOmega, NonconstantOmega, WrongDegree
from canonoid.forms import DiffForm, PolyMap, VectorField, ext_d, interior_prod, lie_deriv_form, pullback_form
from canonoid.poly import equal_mod_constant
from canonoid.symplectic import (
    CONVENTION,
    ConstantNonzeroDet,
    Degenerate,
    SampledNonzeroDet,
    canonical_omega,
    flat,
    hamiltonian_field,
    homotopy_operator,
    homotopy_potential,
    liouville_field,
    poisson,
    primitive_function,
    sample_points,
    sharp,
    validate_symplectic,
)

from conftest import S1, S2, polys, seeded

q, p = S1.coords
dq, dp = DiffForm.dx(S1, 0), DiffForm.dx(S1, 1)
Dq, Dp = VectorField.basis(S1, 0), VectorField.basis(S1, 1)
area = dq ^ dp
W1 = canonical_omega(S1)
W2 = canonical_omega(S2)


def test_convention_string():
    assert CONVENTION == "omega=sum dq_i^dp_i; i(X_f)omega=df; {q,p}=+1"


def test_validate_canonical():
    w = validate_symplectic(area)
    assert w.closed and isinstance(w.evidence, ConstantNonzeroDet) and w.is_valid


def test_validate_degenerate_on_axis():
    w = validate_symplectic(area * q)
    assert w.closed
    assert isinstance(w.evidence, Degenerate)
    assert w.evidence.point[0] == 0
    assert not w.nondegenerate


def test_validate_pullback_constant_det():
    pulled = pullback_form(PolyMap(S1, (2 * q, p), (q / 2, p)), area)
    w = validate_symplectic(pulled)
    assert w.closed and isinstance(w.evidence, ConstantNonzeroDet)
    assert w.evidence.det == 4


def test_validate_sampled_evidence():
    # closed in 2n = 4, nonconstant determinant that never vanishes
    form = DiffForm(S2, 2, {(0, 2): S2.one() + S2.q(0) ** 2, (1, 3): 1})
    w = validate_symplectic(form)
    assert w.closed
    assert isinstance(w.evidence, SampledNonzeroDet)
    assert len(w.evidence.points) >= 20
    assert not w.is_constant


def test_validate_detects_non_closed():
    form = DiffForm(S2, 2, {(0, 2): S2.one() + S2.q(1), (1, 3): 1})
    assert not validate_symplectic(form).closed


def test_validate_wrong_degree():
    with pytest.raises(WrongDegree):
        validate_symplectic(dq)


def test_sample_points_deterministic():
    assert sample_points(S2) == sample_points(S2)
    assert sample_points(S2)[0] == (0, 0, 0, 0)


def test_flat_examples():
    assert flat(W1, Dq * p) == dp * p
    assert flat(W1, VectorField.zero(S1)).is_zero()
    assert flat(W1, Dp * (-p)) == dq * p


def test_sharp_examples():
    assert sharp(W1, ext_d(p ** 2 / 2)) == Dq * p
    assert sharp(W1, ext_d(-q)) == Dp
    assert sharp(W1, DiffForm.zero(S1, 1)).is_zero()


def test_sharp_needs_constant_omega():
    w = validate_symplectic(area * (1 + q ** 2))
    with pytest.raises(NonconstantOmega):
        sharp(w, dq)


def test_hamiltonian_field_formula():
    f = q ** 2 * p + p ** 3
    assert hamiltonian_field(W1, f) == Dq * f.diff(1) - Dp * f.diff(0)


def test_poisson_examples():
    assert poisson(W1, q, p) == 1
    assert poisson(W1, -q, p ** 2 / 2) == -p
    f = q * p ** 2 + 3
    assert poisson(W1, f, f) == 0


@given(polys(S1), polys(S1), polys(S1))
def test_poisson_jacobi_and_antisymmetry(f, g, h):
    P = lambda a, b: poisson(W1, a, b)
    assert P(f, g) == -P(g, f)
    assert (P(f, P(g, h)) + P(g, P(h, f)) + P(h, P(f, g))).is_zero()
    assert P(f, g * h) == P(f, g) * h + g * P(f, h)


@given(polys(S1), polys(S1))
def test_noether_equivalence(g, H):
    lhs = hamiltonian_field(W1, g)(H).is_zero()
    rhs = hamiltonian_field(W1, H)(g).is_zero()
    assert lhs == rhs


@pytest.mark.parametrize("seed", range(20))
def test_sharp_flat_inverse(seed):
    r = seeded(seed)
    X = rg.random_field(r, S2)
    assert sharp(W2, flat(W2, X)) == X
    beta = rg.random_form(r, S2, 1)
    assert flat(W2, sharp(W2, beta)) == beta


def test_liouville_examples():
    assert liouville_field(dq * p) == Dp * (-p)
    theta = (dq * p - dp * q) / 2
    assert liouville_field(theta) == (Dq * q + Dp * p) * Fraction(-1, 2)
    with pytest.raises(DegenerateOmega):
        liouville_field(DiffForm.zero(S1, 1))


@pytest.mark.parametrize("seed", range(10))
def test_liouville_postcondition(seed):
    # theta = p dq + dg for random g; -d theta is the canonical form
    r = seeded(seed)
    theta = DiffForm.dx(S2, 0) * S2.p(0) + DiffForm.dx(S2, 1) * S2.p(1) + ext_d(rg.random_poly(r, S2))
    X1 = liouville_field(theta)
    omega = -ext_d(theta)
    assert interior_prod(X1, omega) == theta
    assert lie_deriv_form(X1, omega) == -omega


def test_homotopy_examples():
    pot = homotopy_potential(dq)
    assert pot.primitive.scalar_part == q and pot.exact
    pot = homotopy_potential(area)
    assert pot.primitive == (dp * q - dq * p) / 2 and pot.exact
    pot = homotopy_potential(dq * p)
    assert not pot.exact
    assert pot.residual == dq * p - ext_d(pot.primitive)


def test_homotopy_rejects_scalars():
    with pytest.raises(WrongDegree):
        homotopy_operator(DiffForm.scalar(q))


@pytest.mark.parametrize("seed", range(20))
def test_homotopy_identity(seed):
    r = seeded(seed)
    for k in range(1, 5):
        a = rg.random_form(r, S2, k, max_degree=2)
        lhs = ext_d(homotopy_operator(a))
        if k < 4:
            lhs = lhs + homotopy_operator(ext_d(a))
        assert lhs == a
    f = rg.random_poly(r, S2)
    assert homotopy_operator(ext_d(f)).scalar_part == f - f.constant_term()


def test_primitive_function():
    H = primitive_function(dp * p)
    assert equal_mod_constant(H, p ** 2 / 2)
    assert primitive_function(dq * p) is None
