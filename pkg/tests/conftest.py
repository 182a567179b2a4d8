import random

import pytest
from hypothesis import strategies as st

from neutrocalc.realset import Interval, RealSet


def iv(lo, hi, lo_open=False, hi_open=False):
    return RealSet.interval(lo, hi, lo_open, hi_open)


def pts(*vals):
    return RealSet.of_points(*vals)


@pytest.fixture
def rng():
    return random.Random(20240817)


# hypothesis strategies -------------------------------------------------------

finite = st.floats(min_value=-50, max_value=50, allow_nan=False,
                   allow_infinity=False)


@st.composite
def intervals(draw):
    a = draw(finite)
    b = draw(finite)
    lo, hi = min(a, b), max(a, b)
    if lo == hi:
        return Interval(lo, hi)
    return Interval(lo, hi, draw(st.booleans()), draw(st.booleans()))


@st.composite
def real_sets(draw, min_pieces=1, max_pieces=3, closed_only=False):
    ivs = []
    for _ in range(draw(st.integers(0, max_pieces))):
        got = draw(intervals())
        if closed_only:
            got = Interval(got.lo, got.hi)
        ivs.append(got)
    points = draw(st.lists(finite, min_size=0, max_size=2))
    s = RealSet(ivs, points)
    if s.is_empty() and min_pieces > 0:
        return RealSet.point(draw(finite))
    return s


def random_set(rnd: random.Random, closed_only=False, span=40.0) -> RealSet:
    """Plain-random non-empty set for high-volume seeded loops."""
    ivs, points = [], []
    for _ in range(rnd.randint(0, 2)):
        a = rnd.uniform(-span, span)
        b = a + rnd.uniform(0.0, span / 2)
        if closed_only:
            ivs.append(Interval(a, b))
        else:
            ivs.append(Interval(a, b, rnd.random() < 0.3, rnd.random() < 0.3))
    for _ in range(rnd.randint(0, 2)):
        points.append(rnd.uniform(-span, span))
    s = RealSet(ivs, points)
    if s.is_empty():
        return RealSet.point(rnd.uniform(-span, span))
    return s


def random_subset(rnd: random.Random, s: RealSet) -> RealSet:
    """Non-empty subset of s: shrunken intervals and kept points."""
    ivs, points = [], []
    for piece in s.pieces():
        if piece.is_degenerate():
            if rnd.random() < 0.7:
                points.append(piece.lo)
            continue
        if rnd.random() < 0.25:
            points.append(rnd.uniform(piece.lo, piece.hi))
            continue
        width = piece.hi - piece.lo
        a = piece.lo + rnd.random() * width * 0.4
        b = piece.hi - rnd.random() * width * 0.4
        if a > b:
            a, b = b, a
        if a == b:
            points.append(a)
        else:
            ivs.append(Interval(a, b, piece.lo_open, piece.hi_open))
    sub = RealSet(ivs, points)
    if sub.is_empty():
        piece = s.pieces()[0]
        if piece.is_degenerate():
            return RealSet.point(piece.lo)
        return RealSet.point(0.5 * (piece.lo + piece.hi))
    return sub
