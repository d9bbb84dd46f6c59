"""Arithmetic of L and of the quadratic extension E."""

from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import assume, given, settings

from thetalift.localfield import (ExtElement, FieldConfigError, FieldParams, PadicElement,
                                  PrecisionError, chi_quad, legendre, least_nonresidue,
                                  psi_angle, reduce_mod, unit_part, valuation)

PRIMES = st.sampled_from([3, 5, 7, 11])
KIND = st.sampled_from(["split", "inert", "ramified"])
small = st.integers(-60, 60)
nonzero_frac = st.builds(Fraction, small.filter(bool), st.integers(1, 40))


def test_legendre_table():
    assert [legendre(a, 7) for a in range(1, 7)] == [1, 1, -1, 1, -1, -1]
    assert least_nonresidue(3) == 2 and least_nonresidue(7) == 3


def test_valuation_of_fractions():
    assert valuation(Fraction(50, 3), 5) == 2
    assert valuation(Fraction(3, 125), 5) == -3
    assert unit_part(Fraction(50, 3), 5) == Fraction(2, 3)


def test_params_validation():
    with pytest.raises(FieldConfigError):
        FieldParams.make(9, "split")
    with pytest.raises(FieldConfigError):
        FieldParams.make(2, "inert")
    with pytest.raises(FieldConfigError):
        FieldParams.make(5, "inert", delta=4)
    with pytest.raises(FieldConfigError):
        FieldParams.make(5, "ramified", delta=25)
    with pytest.raises(FieldConfigError):
        FieldParams.make(5, "cyclic")


def test_chi_of_minus_delta_is_one_when_ramified():
    for p in (3, 5, 7, 11, 13):
        for u in (1, least_nonresidue(p)):
            P = FieldParams.make(p, "ramified", pi_unit=u)
            assert chi_quad(P, -P.delta) == 1


def test_inert_character_is_parity_of_valuation():
    P = FieldParams.make(5, "inert")
    assert chi_quad(P, 5) == -1 and chi_quad(P, 25) == 1 and chi_quad(P, 3) == 1


def test_psi_is_trivial_on_integers():
    assert psi_angle(Fraction(7, 1), 5) == 0
    assert psi_angle(Fraction(1, 5), 5) != 0


@settings(max_examples=150, deadline=None)
@given(p=PRIMES, kind=KIND, a=small, b=small, c=small, d=small)
def test_norm_is_multiplicative(p, kind, a, b, c, d):
    P = FieldParams.make(p, kind)
    x, y = ExtElement.of(P, a, b), ExtElement.of(P, c, d)
    assert (x * y).norm() == x.norm() * y.norm()
    assert (x + y).trace() == x.trace() + y.trace()
    assert x * x.conj() == x.norm()


@settings(max_examples=150, deadline=None)
@given(p=PRIMES, kind=KIND, a=small, b=small)
def test_ext_inverse(p, kind, a, b):
    P = FieldParams.make(p, kind)
    x = ExtElement.of(P, a, b)
    assume(x.norm() != 0)
    assert x * x.inverse() == 1


@settings(max_examples=150, deadline=None)
@given(p=PRIMES, kind=KIND, x=nonzero_frac, y=nonzero_frac)
def test_chi_is_a_character(p, kind, x, y):
    P = FieldParams.make(p, kind)
    assert chi_quad(P, x * y) == chi_quad(P, x) * chi_quad(P, y)
    assert chi_quad(P, x * x) == 1


@settings(max_examples=150, deadline=None)
@given(p=PRIMES, x=nonzero_frac, y=nonzero_frac)
def test_padic_product_agrees_with_rationals(p, x, y):
    X = PadicElement.from_rational(x, p, 6)
    Y = PadicElement.from_rational(y, p, 6)
    prod = X * Y
    assert prod.val == valuation(x * y, p)
    diff = prod.to_rational() - x * y
    assert diff == 0 or valuation(diff, p) >= prod.val + 6


def test_padic_cancellation_raises():
    X = PadicElement.from_rational(1, 5, 2)
    Y = PadicElement.from_rational(26, 5, 2)
    with pytest.raises(PrecisionError):
        X - Y


@settings(max_examples=100, deadline=None)
@given(p=PRIMES, x=nonzero_frac, k=st.integers(-3, 3))
def test_reduce_mod_is_congruent(p, x, k):
    r = reduce_mod(x, p, k)
    diff = x - r
    assert diff == 0 or valuation(diff, p) >= k
