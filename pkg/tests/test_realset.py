import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neutrocalc.errors import (
    DivisionBySetContainingZero,
    EmptySetError,
    InvalidEndpoint,
)
from neutrocalc.realset import (
    Interval,
    MembershipTriple,
    RealSet,
    endpoint_metric,
    intersect,
    is_subset,
    membership,
    neutro_subset,
    normalize,
    scale,
    set_add,
    set_div,
    set_mul,
    set_sub,
    sup_norm,
)

from conftest import finite, iv, pts, random_set, random_subset, real_sets


# -- normalization ---------------------------------------------------------


def test_backwards_interval_is_sorted():
    assert normalize([Interval(5, 3)]) == iv(3, 5)


def test_adjacent_closed_intervals_merge():
    assert normalize([Interval(0, 1), Interval(1, 2)]) == iv(0, 2)


def test_half_open_adjacency_merges():
    assert normalize([Interval(0, 1, False, True), Interval(1, 2)]) == iv(0, 2)


def test_open_gap_does_not_merge():
    s = normalize([Interval(0, 1, False, True), Interval(1, 2, True, False)])
    assert len(s.intervals) == 2


def test_point_inside_interval_absorbed():
    assert normalize([Interval(0, 2)], points=[1]) == iv(0, 2)


def test_point_closes_open_endpoint():
    s = normalize([Interval(0, 1, False, True), Interval(1, 2, True, False)],
                  points=[1])
    assert s == iv(0, 2)


def test_degenerate_interval_becomes_point():
    assert normalize([Interval(4, 4)]) == pts(4)


def test_empty_set_distinct_from_zero():
    assert RealSet.empty() != pts(0)
    assert RealSet.empty().is_empty()


def test_nonfinite_endpoint_rejected():
    with pytest.raises(InvalidEndpoint):
        normalize([Interval(0, math.inf)])
    with pytest.raises(InvalidEndpoint):
        normalize([], points=[math.nan])


@given(real_sets())
def test_normalize_idempotent(s):
    again = RealSet(s.intervals, s.points, s.annotations)
    assert again == s


# -- elementwise arithmetic ---------------------------------------------------


def test_sub_interval_minus_itself():
    assert iv(3, 6) - iv(3, 6) == iv(-3, 3)


def test_point_minus_interval():
    assert pts(-3) - iv(1, 2) == iv(-5, -4)


def test_div_open_by_open():
    got = iv(1, 3, True, True) / iv(1, 3, True, True)
    assert got == iv(1 / 3, 3, True, True)


def test_scale_identity():
    s = RealSet.union(iv(1, 2, True, False), pts(5))
    assert scale(1.0, s) == s


def test_scale_by_zero_collapses():
    assert scale(0.0, iv(2, 3)) == pts(0)


def test_negation_flips_openness():
    got = scale(-1.0, iv(1, 2, True, False))
    assert got == iv(-2, -1, False, True)


def test_division_by_zero_containing_set():
    with pytest.raises(DivisionBySetContainingZero):
        iv(1, 2) / iv(-1, 1)
    with pytest.raises(DivisionBySetContainingZero):
        iv(1, 2) / iv(0, 1, True, False)  # zero on the closure


def test_mul_zero_endpoint_attained():
    # 0 is reached by the closed factor even where corners are open
    got = iv(0, 1) * iv(0, 1, True, True)
    assert got == iv(0, 1, False, True)


@settings(max_examples=300, deadline=None)
@given(st.lists(finite, min_size=1, max_size=6),
       st.lists(finite, min_size=1, max_size=6),
       st.sampled_from(["add", "sub", "mul", "div"]))
def test_agrees_with_pointwise_enumeration(xs, ys, op):
    if op == "div" and any(abs(y) < 1e-9 for y in ys):
        ys = [y + 1.0 for y in ys]
        if any(abs(y) < 1e-9 for y in ys):
            return
    a, b = pts(*xs), pts(*ys)
    fn = {"add": set_add, "sub": set_sub, "mul": set_mul, "div": set_div}[op]
    got = fn(a, b)
    pyop = {"add": lambda p, q: p + q, "sub": lambda p, q: p - q,
            "mul": lambda p, q: p * q, "div": lambda p, q: p / q}[op]
    want = sorted({pyop(p, q) for p, q in itertools.product(xs, ys)})
    assert not got.intervals
    assert len(got.points) == len(want)
    assert all(abs(p - q) < 1e-9 for p, q in zip(got.points, want))


def test_inclusion_isotonicity_seeded(rng):
    ops = [set_add, set_sub, set_mul, set_div]
    for k in range(400):
        c = random_set(rng)
        d = random_set(rng)
        a = random_subset(rng, c)
        b = random_subset(rng, d)
        op = ops[k % 4]
        if op is set_div and d.inf <= 0 <= d.sup:
            d = d + pts(d.sup - d.inf + 1.0)
            b = random_subset(rng, d)
        assert is_subset(op(a, b), op(c, d)), (a, b, c, d, op.__name__)


# -- norm -----------------------------------------------------------------------


def test_norm_singleton_is_abs():
    assert sup_norm(pts(-7.5)) == 7.5


def test_norm_interval():
    assert sup_norm(iv(-3, 2)) == 3


def test_norm_matches_metric_to_origin():
    a = iv(1, 4)
    assert endpoint_metric(a, pts(0)) == sup_norm(a) == 4


def test_norm_empty_rejected():
    with pytest.raises(EmptySetError):
        sup_norm(RealSet.empty())
    with pytest.raises(EmptySetError):
        endpoint_metric(RealSet.empty(), pts(0))


def test_norm_laws_seeded(rng):
    for _ in range(400):
        s = random_set(rng)
        t = random_set(rng)
        alpha = rng.uniform(-5, 5)
        assert sup_norm(scale(-1.0, s)) == pytest.approx(sup_norm(s), abs=1e-9)
        assert sup_norm(scale(alpha, s)) == pytest.approx(
            abs(alpha) * sup_norm(s), rel=1e-12, abs=1e-9)
        assert sup_norm(s + t) <= sup_norm(s) + sup_norm(t) + 1e-9
        assert sup_norm(s - t) <= sup_norm(s) + sup_norm(t) + 1e-9
        assert endpoint_metric(s, pts(0)) == pytest.approx(sup_norm(s), abs=1e-12)


# -- partial metric ---------------------------------------------------------------


def test_metric_zero_without_identity():
    a, b = pts(3, 4, 5, 7), pts(3, 7)
    assert endpoint_metric(a, b) == 0.0
    assert a != b


def test_metric_singletons():
    assert endpoint_metric(pts(2.5), pts(-1)) == 3.5


def test_metric_intervals():
    assert endpoint_metric(iv(1, 4), iv(2, 9)) == 5


def test_metric_axioms_seeded(rng):
    for _ in range(400):
        a, b, c = (random_set(rng) for _ in range(3))
        dab = endpoint_metric(a, b)
        assert dab >= 0.0
        assert endpoint_metric(a, a) == 0.0
        assert dab == endpoint_metric(b, a)
        assert dab <= endpoint_metric(b, c) + endpoint_metric(c, a) + 1e-9


# -- intersection ------------------------------------------------------------------


def test_intersect_overlapping_closed():
    assert intersect(iv(8, 11), iv(6, 9)) == iv(8, 9)


def test_intersect_disjoint_is_empty():
    assert intersect(iv(0, 1), iv(2, 3)).is_empty()


def test_intersect_open_endpoint_excludes():
    assert intersect(iv(0, 2, False, True), iv(2, 3)).is_empty()
    assert intersect(iv(0, 2), iv(2, 3)) == pts(2)


@given(real_sets(), real_sets(), real_sets())
@settings(max_examples=200, deadline=None)
def test_intersect_laws(a, b, c):
    assert intersect(a, a) == a
    assert intersect(a, b) == intersect(b, a)
    assert intersect(intersect(a, b), c) == intersect(a, intersect(b, c))


# -- membership and subset relations --------------------------------------------


def annotated_l():
    # [0, 5) plus a partially-belonging right endpoint
    return RealSet([Interval(0, 5, False, True)],
                   annotations={5.0: MembershipTriple(0.6, 0.1, 0.3)}.items())


def test_membership_annotated_endpoint():
    l = annotated_l()
    assert membership(l, 5) == MembershipTriple(0.6, 0.1, 0.3)
    assert membership(l, 2) == MembershipTriple(1, 0, 0)
    assert membership(l, 6) == MembershipTriple(0, 0, 1)


def test_membership_components_can_exceed_one():
    MembershipTriple(0.6, 0.2, 0.5)  # sum 1.3 is fine
    with pytest.raises(ValueError):
        MembershipTriple(1.2, 0, 0)


def test_partial_endpoint_sits_between_open_and_closed():
    l = annotated_l()
    assert neutro_subset(iv(0, 5, False, True), l)
    assert neutro_subset(l, iv(0, 5))
    assert not neutro_subset(iv(0, 5), iv(0, 5, False, True))
    assert not neutro_subset(iv(0, 5), l)


def test_subset_respects_points_and_openness():
    assert neutro_subset(pts(1, 2), iv(0, 3))
    assert not neutro_subset(pts(3), iv(0, 3, False, True))
    assert neutro_subset(iv(1, 2, True, True), iv(1, 2))
