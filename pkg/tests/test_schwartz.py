"""Box-term Schwartz functions: normal form, evaluation, equality, JSON."""

import itertools
import json
from fractions import Fraction

import hypothesis.strategies as st
import numpy as np
from hypothesis import given, settings

from thetalift import oracle as O
from thetalift.localfield import FieldParams
from thetalift.schwartz import (Ideal, SchwartzFunction, Shell, covering_grid, equal, evaluate,
                                from_json, negate_argument, scale_argument, tensor, to_json)

KIND = st.sampled_from(["split", "inert", "ramified"])
lv = st.integers(-1, 2)
levels = st.tuples(lv, lv, lv, lv)


def box(P, levels, twists=()):
    return SchwartzFunction.box(P, [Shell(m) if i in twists else Ideal(m)
                                    for i, m in enumerate(levels)], twists)


def test_ideal_splits_into_shells():
    P = FieldParams.make(3, "inert")
    whole = box(P, (0, 0, 0, 0))
    parts = box(P, (1, 0, 0, 0)) + SchwartzFunction.box(P, [Shell(0), Ideal(0), Ideal(0), Ideal(0)])
    assert whole == parts


def test_zero_cancellation():
    P = FieldParams.make(5, "split")
    f = box(P, (0, 1, 0, 0))
    assert (f - f).is_zero()


def test_constraint_equality_is_exhaustive():
    P = FieldParams.make(3, "split")
    f = SchwartzFunction.box(P, [Ideal(0)] * 8, constraints=[("xy", 0)])
    g = SchwartzFunction.box(P, [Ideal(0)] * 8)
    v = equal(f, g)
    assert v and v.certificate in ("canonical", "exhaustive")
    h = SchwartzFunction.box(P, [Ideal(-1)] + [Ideal(0)] * 7, constraints=[("xy", 0)])
    k = SchwartzFunction.box(P, [Ideal(-1)] + [Ideal(0)] * 7)
    assert not equal(h, k)


@settings(max_examples=60, deadline=None)
@given(p=st.sampled_from([3, 5]), kind=KIND, a=levels, b=levels,
       tw=st.sets(st.integers(0, 3), max_size=2))
def test_json_round_trip(p, kind, a, b, tw):
    P = FieldParams.make(p, kind)
    f = box(P, a, tuple(tw)).scale(Fraction(3, 7)) + box(P, b)
    doc = json.loads(json.dumps(to_json(f)))
    assert from_json(doc) == f


@settings(max_examples=40, deadline=None)
@given(p=st.sampled_from([3, 5]), kind=KIND, a=st.tuples(*[st.integers(-1, 1)] * 4),
       tw=st.sets(st.integers(0, 3), max_size=2))
def test_pointwise_matches_oracle_table(p, kind, a, tw):
    P = FieldParams.make(p, kind)
    f = box(P, a, tuple(tw)) + box(P, (0, 0, 0, 0)).scale(2)
    w = O.FiniteWindow.covering(f)
    consts = O.resolve_constants(P)
    table = O.sample(f, w, consts)
    rng = np.random.default_rng(0)
    for _ in range(20):
        idx = tuple(int(rng.integers(s)) for s in w.shape)
        pt = [w.axis_values(i)[k] for i, k in enumerate(idx)]
        assert abs(evaluate(f, pt).evaluate() - table[idx]) < 1e-12


@settings(max_examples=60, deadline=None)
@given(p=st.sampled_from([3, 5, 7]), kind=KIND, a=levels, k=st.integers(-2, 2),
       tw=st.sets(st.integers(0, 3), max_size=2))
def test_scaling_composes(p, kind, a, k, tw):
    P = FieldParams.make(p, kind)
    f = box(P, a, tuple(tw))
    s = Fraction(p) ** k
    assert scale_argument(scale_argument(f, s), 1 / s) == f
    assert negate_argument(negate_argument(f)) == f


def test_tensor_evaluates_as_product():
    P = FieldParams.make(3, "ramified")
    f = box(P, (0, 0, 0, 0), (0,))
    g = box(P, (1, 0, 0, 0))
    fg = tensor(f, g)
    for x in itertools.islice(itertools.product(*covering_grid(fg)), 0, 500, 7):
        assert evaluate(fg, x) == evaluate(f, x[:4]) * evaluate(g, x[4:])
