"""The quadratic space X, the similitude action and the stabilizer H."""

from fractions import Fraction

import hypothesis.strategies as st
from hypothesis import assume, given, settings

from thetalift.localfield import ExtElement, FieldParams
from thetalift.quadspace import (GsoElement, XPoint, base_points, canonical_basis,
                                 in_stabilizer, kernel_element, mat2, pair, pair_by_trace,
                                 pair_raw, quad, similitude_certified,
                                 stabilizer_closed_form)

KIND = st.sampled_from(["split", "inert", "ramified"])
PRIME = st.sampled_from([3, 5, 7])
small = st.integers(-9, 9)
coords = st.tuples(small, small, small, small)


@settings(max_examples=150, deadline=None)
@given(p=PRIME, kind=KIND, x=coords, y=coords)
def test_pairing_routes_agree(p, kind, x, y):
    P = FieldParams.make(p, kind)
    X, Y = XPoint.of(P, *x), XPoint.of(P, *y)
    assert pair(X, Y) == pair_by_trace(X, Y) == pair_raw(X, Y)
    assert pair(X, Y) == pair(Y, X)


def test_base_points_are_orthogonal_pair():
    for kind in ("split", "inert", "ramified"):
        P = FieldParams.make(5, kind)
        x1, x2 = base_points(P)
        assert quad(x1) == 0 and quad(x2) == 0
        assert pair(x1, x2) != 0


def split_elem(P, a, b):
    return GsoElement.split(P, mat2(*a), mat2(*b))


def ext(P, a, b=0):
    return ExtElement.of(P, a, b)


@settings(max_examples=80, deadline=None)
@given(p=PRIME, a=st.tuples(small, small, small, small), b=st.tuples(small, small, small, small))
def test_split_action_is_similitude(p, a, b):
    P = FieldParams.make(p, "split")
    assume(a[0] * a[3] - a[1] * a[2] != 0 and b[0] * b[3] - b[1] * b[2] != 0)
    assert similitude_certified(split_elem(P, a, b))


@settings(max_examples=80, deadline=None)
@given(p=PRIME, kind=st.sampled_from(["inert", "ramified"]),
       e=st.tuples(small, small, small, small, small, small, small, small),
       t=st.integers(1, 9))
def test_nonsplit_action_is_similitude(p, kind, e, t):
    P = FieldParams.make(p, kind)
    g = mat2(ext(P, e[0], e[1]), ext(P, e[2], e[3]), ext(P, e[4], e[5]), ext(P, e[6], e[7]))
    det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
    assume(det.norm() != 0)
    h = GsoElement.nonsplit(P, t, g)
    assert similitude_certified(h)
    x = XPoint.of(P, 1, 2, 3, 4)
    assert h.inverse().apply(h.apply(x)) == x


@settings(max_examples=60, deadline=None)
@given(p=PRIME, kind=KIND, z=st.integers(1, 30))
def test_kernel_acts_trivially(p, kind, z):
    P = FieldParams.make(p, kind)
    h = kernel_element(P, z)
    for x in canonical_basis(P):
        assert h.apply(x) == x


@settings(max_examples=80, deadline=None)
@given(p=PRIME, a=st.integers(1, 20), s=st.integers(-20, 20))
def test_split_stabilizer_closed_form(p, a, s):
    P = FieldParams.make(p, "split")
    h = split_elem(P, (a, 0, 0, 1), (Fraction(1, a), 0, 0, 1))
    assert in_stabilizer(h) and stabilizer_closed_form(h)
    g = split_elem(P, (a, s, 0, 1), (Fraction(1, a), 0, 0, 1))
    assert in_stabilizer(g) == stabilizer_closed_form(g)


@settings(max_examples=80, deadline=None)
@given(p=PRIME, kind=st.sampled_from(["inert", "ramified"]), a=small, b=small, s=small)
def test_nonsplit_stabilizer_closed_form(p, kind, a, b, s):
    P = FieldParams.make(p, kind)
    z = ext(P, a, b)
    assume(z.norm() != 0)
    zero = ext(P, 0)
    u = z.conj() / z  # norm one
    h = GsoElement.nonsplit(P, z.norm(), mat2(z, zero, zero, z * u))
    assert in_stabilizer(h) and stabilizer_closed_form(h)
    g = GsoElement.nonsplit(P, z.norm(), mat2(z, ext(P, s), zero, z * u))
    assert in_stabilizer(g) == stabilizer_closed_form(g)
