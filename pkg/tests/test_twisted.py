import pytest

from canonoid.errors import ContractScalar, IterationBudgetExceeded
from canonoid.forms import DiffForm, VectorField, ext_d, interior_prod
from canonoid.twisted import TwistedContext, d_gamma, del_gamma, iter_lie

from conftest import S1

q, p = S1.coords
dq, dp = DiffForm.dx(S1, 0), DiffForm.dx(S1, 1)
Dq, Dp = VectorField.basis(S1, 0), VectorField.basis(S1, 1)
free = TwistedContext(Dq * p)
osc = TwistedContext(Dq * p - Dp * q)


def test_d_gamma_on_functions():
    once = d_gamma(free, -q)
    assert once == -dp
    assert d_gamma(free, once).is_zero()
    assert d_gamma(free, p ** 2 / 2).is_zero()


def test_d_gamma_is_d_i_d():
    beta = dq * p ** 2 - dp * (p * q)
    assert d_gamma(free, beta).is_zero()
    a = dq * q * p + dp * q ** 2
    assert d_gamma(free, a) == ext_d(interior_prod(free.gamma, ext_d(a)))


def test_del_gamma_examples():
    assert del_gamma(free, dp * (-3 * p * q)).is_zero()
    assert del_gamma(osc, dq * p).scalar_part == -2 * p * q
    assert del_gamma(TwistedContext(VectorField.zero(S1)), dq).is_zero()


def test_del_gamma_rejects_scalars():
    with pytest.raises(ContractScalar):
        del_gamma(free, DiffForm.scalar(q))


def test_iter_lie_examples():
    assert iter_lie(free, Dp, 2).is_zero()
    assert iter_lie(free, Dp, 1) == -Dq
    assert iter_lie(free, -q, 1) == -p
    assert iter_lie(free, -q, 2) == 0
    assert iter_lie(free, dq * q, 0) == dq * q
    assert iter_lie(free, Dp, 0) == Dp


def test_iter_lie_budget():
    ctx = TwistedContext(Dq * p, max_iter=3)
    with pytest.raises(IterationBudgetExceeded):
        iter_lie(ctx, q, 4)


def test_context_defaults_to_canonical_omega():
    assert free.omega.form == dq ^ dp
    assert free.space == S1
