from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from compound_tails.compound import laplace_character
from compound_tails.operator_ring import (
    NonzeroConstantTermError,
    OrderMismatchError,
    TruncatedOperator,
    op_add,
    op_d,
    op_exp_nilpotent,
    op_identity,
    op_invert,
    op_mul,
    op_pow,
    op_scale,
    op_zero,
)
from compound_tails.coeff_ring import ParamPoly

from conftest import fractions, moment_sequences, operator_pairs, operators

T = TruncatedOperator


def binomial_moments(mu_h, mu_k):
    return [sum(comb(j, i) * mu_h[i] * mu_k[j - i] for i in range(j + 1)) for j in range(len(mu_h))]


def test_identity():
    assert op_identity(0).coeffs == (1,)
    assert op_identity(3).coeffs == (1, 0, 0, 0)


def test_add():
    assert op_add(T([1, 2]), T([0, -2])) == T([1, 0])
    A = T([3, 4, 5])
    assert A + op_zero(2) == A
    with pytest.raises(OrderMismatchError):
        op_add(T([1, 2]), T([1, 2, 3]))


def test_mul_examples():
    mu, nu = Fraction(3, 2), Fraction(5)
    assert op_mul(T([1, -mu]), T([1, -nu])) == T([1, -(mu + nu)])
    assert op_d(2) * op_d(2) == T([0, 0, 1])
    with pytest.raises(OrderMismatchError):
        op_mul(T([1]), T([1, 1]))


def test_scale():
    A = T([1, 2, 3])
    assert op_scale(0, A).is_zero()
    assert op_scale(1, A) == A
    a = ParamPoly.theta()
    assert op_scale(a, op_identity(0)) == T([a])


def test_pow():
    A = T([1, 2, 3, 4])
    assert op_pow(A, 0) == op_identity(3)
    assert op_pow(A, 1) == A
    assert op_pow(T([1, -6, 0, 0]), 2) == T([1, -12, 36, 0])


def test_exp():
    assert op_exp_nilpotent(op_zero(3)) == op_identity(3)
    c = Fraction(7, 3)
    assert op_exp_nilpotent(T([0, c])) == T([1, c])
    assert op_exp_nilpotent(T([0, c, 0])) == T([1, c, c * c / 2])
    with pytest.raises(NonzeroConstantTermError):
        op_exp_nilpotent(T([1, 1]))


def test_invert():
    assert op_invert(op_identity(4)) == op_identity(4)
    c = Fraction(2, 5)
    assert op_invert(T([1, -c])) == T([1, c])
    with pytest.raises(NonzeroConstantTermError):
        op_invert(T([0, 1]))
    with pytest.raises(NonzeroConstantTermError):
        op_invert(T([ParamPoly.theta(), 1]))


def test_truncate():
    assert T([1, 2, 3]).truncate(1) == T([1, 2])
    with pytest.raises(OrderMismatchError):
        T([1, 2]).truncate(3)


def test_render():
    a = ParamPoly.theta()
    A = T([a, -6 * a * a, 360 * a * a + 18 * a**3])
    assert A.render("a") == "a - 6*a^2*D + (360*a^2 + 18*a^3)*D^2"
    assert op_identity(2).render() == "1"
    assert op_zero(1).render() == "0"


@given(operator_pairs(count=3))
def test_ring_laws(ops):
    A, B, C = ops
    assert A * B == B * A
    assert (A * B) * C == A * (B * C)
    assert A * (B + C) == A * B + A * C
    assert op_identity(A.order) * A == A


@given(operators())
def test_nilpotency(A):
    N = T((0,) + A.coeffs[1:])
    assert op_pow(N, N.order + 1).is_zero()


@given(operators(c0=Fraction(0)))
def test_exp_invert_coherence(N):
    assert op_invert(op_exp_nilpotent(N)) == op_exp_nilpotent(-N)


@given(operators(c0=Fraction(1)))
def test_invert_defining_property(A):
    assert op_mul(A, op_invert(A)) == op_identity(A.order)


@given(operators(), fractions.filter(lambda x: x != 0))
def test_invert_general_constant(A, c0):
    A = T((c0,) + A.coeffs[1:])
    assert A * A.invert() == op_identity(A.order)


@given(st.integers(0, 6).flatmap(lambda m: st.tuples(moment_sequences(m), moment_sequences(m))))
def test_character_multiplicativity(pair):
    mu_h, mu_k = pair
    m = len(mu_h) - 1
    lhs = laplace_character(mu_h, m) * laplace_character(mu_k, m)
    assert lhs == laplace_character(binomial_moments(mu_h, mu_k), m)
