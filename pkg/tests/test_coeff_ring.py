import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from compound_tails.coeff_ring import (
    NonInvertibleError,
    ParamPoly,
    parse_poly,
    render,
    ring_add,
    ring_evaluate,
    ring_invert,
    ring_mul,
)

from conftest import fractions, polys

theta = ParamPoly.theta()


def test_rational_add_mul():
    assert ring_add(Fraction(1, 2), Fraction(1, 3)) == Fraction(5, 6)
    assert ring_mul(Fraction(2, 3), Fraction(3, 5)) == Fraction(2, 5)


def test_poly_add():
    assert (20 + theta) + theta == ParamPoly([20, 2])


def test_poly_mul():
    assert (1 + theta) * (1 - theta) == ParamPoly([1, 0, -1])


def test_additive_identity_random():
    rng = random.Random(7)
    for _ in range(50):
        p = ParamPoly(Fraction(rng.randint(-99, 99), rng.randint(1, 20)) for _ in range(rng.randint(0, 6)))
        assert p + ParamPoly() == p
        assert p + 0 == p
        assert p * 1 == p


def test_invert():
    assert ring_invert(Fraction(6)) == Fraction(1, 6)
    assert ring_invert(ParamPoly.const(4)) == ParamPoly.const(Fraction(1, 4))
    with pytest.raises(ZeroDivisionError):
        ring_invert(Fraction(0))
    with pytest.raises(ZeroDivisionError):
        ring_invert(ParamPoly())
    with pytest.raises(NonInvertibleError):
        ring_invert(1 + theta)


def test_evaluate():
    assert ring_evaluate(20 + theta, 1) == 21
    assert ring_evaluate(ParamPoly(), Fraction(3, 7)) == 0
    # 1680 + 60/2 + 1/4
    assert ring_evaluate(ParamPoly([1680, 60, 1]), Fraction(1, 2)) == Fraction(6841, 4)


def test_canonical_form():
    p = ParamPoly([1, 2, 0, 0])
    assert p.coeffs == (1, 2)
    assert ParamPoly(p.coeffs).coeffs == p.coeffs
    assert ParamPoly([0, 0]).is_zero()
    assert ParamPoly([0, 0]).degree == -1


def test_immutable():
    with pytest.raises(AttributeError):
        theta.coeffs = ()


@pytest.mark.parametrize(
    "poly, symbol, text",
    [
        (ParamPoly([20, 1]), "a", "20 + a"),
        (ParamPoly([0, 0, 2]), "a", "2*a^2"),
        (ParamPoly([1, 0, -1]), "b", "1 - b^2"),
        (ParamPoly([0, 0, Fraction(280, 3), Fraction(2, 3)]), "a", "280/3*a^2 + 2/3*a^3"),
        (ParamPoly([Fraction(-1, 2)]), None, "-1/2"),
        (ParamPoly(), "a", "0"),
    ],
)
def test_render(poly, symbol, text):
    assert poly.render(symbol) == text
    assert parse_poly(text, symbol) == poly


def test_render_scalar():
    assert render(Fraction(5, 6)) == "5/6"
    assert render(Fraction(4, 2)) == "2"


@given(polys, polys, polys)
def test_ring_laws(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p - p == ParamPoly()


@given(polys, polys, fractions)
def test_evaluate_is_homomorphism(p, q, v):
    assert (p * q).evaluate(v) == p.evaluate(v) * q.evaluate(v)
    assert (p + q).evaluate(v) == p.evaluate(v) + q.evaluate(v)


@given(polys, st.sampled_from(["a", "b"]))
def test_render_parse_roundtrip(p, symbol):
    assert parse_poly(p.render(symbol), symbol) == p
