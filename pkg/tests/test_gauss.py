"""Gauss integrals against Riemann sums over finite quotients."""

import itertools
import time
from fractions import Fraction

import pytest

from thetalift.localfield import FieldParams, least_nonresidue
from thetalift.oracle import gauss_sum, numeric_gauss
from thetalift.schwartz import Ideal, Shell
from thetalift.weilrep import gauss_integral

KINDS = ("split", "inert", "ramified")


def grid(p):
    units = (1, least_nonresidue(p), -1)
    for m, vc, tw, u in itertools.product(range(-3, 4), range(-5, 4), (False, True), units):
        yield m, Fraction(u) * Fraction(p) ** vc, tw


def compare(P, c_set, kind, m, tw, c):
    sym = gauss_integral(P, c_set, tw, c)
    num = numeric_gauss(P, kind, m, tw, c)
    val = sym.evaluate(tau=gauss_sum(P.p))
    assert abs(val - num) < 1e-9, (P.kind, kind, m, tw, c, val, num)
    if sym.is_rational():
        exact = sym.as_fraction()
        assert abs(num.imag) < 1e-9
        scaled = num.real * exact.denominator
        assert abs(scaled - round(scaled)) < 1e-6
        assert Fraction(round(scaled), exact.denominator) == exact


@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("kind", KINDS)
def test_gauss_suite(p, kind):
    P = FieldParams.make(p, kind)
    for m, c, tw in grid(p):
        compare(P, Ideal(m), "ideal", m, tw, c)
        compare(P, Shell(m), "shell", m, tw, c)


def test_gauss_suite_runtime():
    t0 = time.perf_counter()
    for p, kind in itertools.product((3, 5, 7), KINDS):
        P = FieldParams.make(p, kind)
        for m, vc, tw in itertools.product(range(-3, 4), range(-5, 4), (False, True)):
            c = Fraction(p) ** vc
            for c_set, kind in ((Ideal(m), "ideal"), (Shell(m), "shell")):
                gauss_integral(P, c_set, tw, c)
                numeric_gauss(P, kind, m, tw, c)
    assert time.perf_counter() - t0 < 10


def test_gauss_sum_squares_to_signed_q():
    for p in (3, 5, 7, 11):
        tau = gauss_sum(p)
        assert abs(tau * tau - (-1) ** ((p - 1) // 2) * p) < 1e-9


def test_zero_character_integral_is_volume():
    P = FieldParams.make(5, "split")
    assert gauss_integral(P, Ideal(2), False, 0).as_fraction() == Fraction(1, 25)
    assert gauss_integral(P, Ideal(-1), False, 5).as_fraction() == 5
    assert gauss_integral(P, Ideal(-1), False, Fraction(1, 5)).is_zero()
