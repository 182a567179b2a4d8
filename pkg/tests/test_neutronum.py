import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neutrocalc.errors import (
    DivisionByZero,
    IndeterminateDenominator,
    NotInvertible,
    UndefinedSubindeterminacyProduct,
)
from neutrocalc.neutronum import I, NeutroNumber, nn_arith, nn_eval_rational
from neutrocalc.textparse import parse_expr, render_nn

NN = NeutroNumber.of


def test_square_uses_idempotence():
    # (2+3I)^2 = 4 + 12I + 9I^2 = 4 + 21I
    assert (NN(2, 3) * NN(2, 3)) == NN(4, 21)


def test_cross_product():
    assert NN(1, 1) * NN(2, 3) == NN(2, 8)


def test_division_by_crisp():
    got = NN(6, 29).div_crisp(8)
    assert got == NN(6 / 8, 29 / 8)
    with pytest.raises(DivisionByZero):
        NN(1, 1).div_crisp(0)


def test_i_power_idempotent():
    acc = I
    for _ in range(6):
        acc = acc * I
        assert acc == I
    assert I ** 5 == I


def test_zero_coefficient_dropped():
    x = NN(3, 2) - NN(0, 2)
    assert x.is_crisp and x == NeutroNumber(3)
    assert NeutroNumber(0) * I == NeutroNumber(0)  # 0*I = 0


def test_distinct_indices_cannot_multiply():
    a = NeutroNumber.of(0, 2, index=1)
    b = NeutroNumber.of(0, 3, index=2)
    with pytest.raises(UndefinedSubindeterminacyProduct):
        a * b
    # linear combination is fine
    s = a + b
    assert s.coeff(1) == 2 and s.coeff(2) == 3


def test_nn_arith_dispatch():
    assert nn_arith("add", NN(1, 2), NN(3, 4)) == NN(4, 6)
    assert nn_arith("sub", NN(1, 2), NN(3, 4)) == NN(-2, -2)
    assert nn_arith("mul", NN(1, 1), NN(2, 3)) == NN(2, 8)
    assert nn_arith("div_by_crisp", NN(6, 29), c=8) == NN(0.75, 3.625)


coef = st.floats(min_value=-20, max_value=20, allow_nan=False, allow_infinity=False)


@given(coef, coef, coef, coef)
def test_add_sub_inverse(a, b, c, d):
    x, y = NN(a, b), NN(c, d)
    assert ((x + y) - y).close_to(x, 1e-9)


@settings(max_examples=300)
@given(*(coef for _ in range(6)))
def test_mul_assoc_comm_single_index(a, b, c, d, e, f):
    x, y, z = NN(a, b), NN(c, d), NN(e, f)
    assert (x * y).close_to(y * x, 1e-12 * (1 + abs(a * c)) + 1e-6)
    assert ((x * y) * z).close_to(x * (y * z), 1e-6)


@given(coef, coef)
def test_crisp_embedding(a, c):
    assert (NeutroNumber(a) * NeutroNumber(c)).a == a * c
    assert (NeutroNumber(a) + NeutroNumber(c)).a == a + c


def test_inverse_round_trip():
    x = NN(2, 3)
    assert (x * x.inverse()).close_to(NeutroNumber(1), 1e-12)
    with pytest.raises(NotInvertible):
        NN(0, 3).inverse()  # a = 0
    with pytest.raises(NotInvertible):
        NN(2, -2).inverse()  # a + b = 0
    assert (NN(6, 4) / NN(2, 0)).close_to(NN(3, 2), 1e-12)


def test_rational_evaluation_from_worked_limit():
    num = parse_expr("x^2 + (1+I)*x")
    den = parse_expr("2*x + 4 - 6*I")
    got = nn_eval_rational(num, den, NN(2, 3))
    assert got == NN(0.75, 3.625)
    assert render_nn(got) == "0.75 + 3.625*I"


def test_rational_evaluation_identity():
    assert nn_eval_rational(parse_expr("x"), parse_expr("1"),
                            NeutroNumber(5)) == NeutroNumber(5)


def test_rational_square_by_hand():
    # (1+I)^2 = 1 + 2I + I^2 = 1 + 3I
    got = nn_eval_rational(parse_expr("x^2"), parse_expr("1"), NN(1, 1))
    assert got == NN(1, 3)


def test_rational_rejects_indeterminate_denominator():
    with pytest.raises(IndeterminateDenominator):
        nn_eval_rational(parse_expr("x"), parse_expr("x"), NN(2, 3))
    with pytest.raises(IndeterminateDenominator):
        nn_eval_rational(parse_expr("x"), parse_expr("0"), NeutroNumber(2))
